#include "zkmixer/consensus.hpp"
#include "zkmixer/error.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"

using namespace zkmixer;
using testutil::error_code;

namespace {

AccountId v(std::size_t i) { return AccountId("v" + std::to_string(i)); }

struct Rig {
  SimChain chain;
  std::shared_ptr<const HashScheme> scheme = default_hash_scheme();
  std::unique_ptr<ZkMixer> mixer;
  std::unique_ptr<MultiSig> ms;
  std::mt19937_64 rng{4};

  Rig(std::size_t roster, MixerMode mode = MixerMode::ConstantTime, bool confiscation = false,
      std::optional<Tick> expiry = std::nullopt) {
    Digest32 k;
    k.fill(1);
    MixerConfig cfg;
    cfg.mode = mode;
    cfg.constant_lock = 10;
    cfg.tree_depth = 6;
    cfg.allow_confiscation = confiscation;
    chain.create_account(AccountId("alice"), 5);
    mixer = std::make_unique<ZkMixer>(cfg, chain, scheme, std::make_shared<AttestedWitnessBackend>(scheme, k));
    ConsensusConfig cc;
    cc.manager = AccountId("manager");
    for (std::size_t i = 0; i < roster; ++i) cc.verifiers.push_back(v(i));
    cc.proposal_expiry = expiry;
    ms = std::make_unique<MultiSig>(cc, *mixer, chain);
  }

  PreDepositId deposit(Tick t = 1) {
    return *mixer->deposit(AccountId("alice"), make_note(*scheme, rng).commitment, 1, t).pre_deposit;
  }
};

}  // namespace

TEST(MultiSig, StrictMajorityOverFullRoster) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (std::size_t yes = 1; yes <= n; ++yes) {
      Rig r(n);
      auto d = r.deposit();
      r.ms->freeze_deposit(v(0), d, 1);
      auto p = r.ms->propose(v(0), d, Motion::refund(), 1);
      for (std::size_t i = 1; i < n; ++i) r.ms->vote(v(i), p, i < yes ? Ballot::Yes : Ballot::No, 2);
      const auto status = r.ms->tally(p, 3, "t");
      const bool pass = 2 * yes > n;
      EXPECT_EQ(status, pass ? ProposalStatus::Passed : ProposalStatus::Failed) << n << " " << yes;
      // refund passes, otherwise the deposit is admitted
      EXPECT_EQ(r.mixer->pre_deposit(d).state, pass ? DepositState::Refunded : DepositState::Admitted)
          << n << " " << yes;
    }
  }
}

TEST(MultiSig, AbstentionsCountAgainst) {
  Rig r(4);
  auto d = r.deposit();
  r.ms->freeze_deposit(v(1), d, 1);
  auto p = r.ms->propose(v(1), d, Motion::refund(), 1);
  r.ms->vote(v(2), p, Ballot::Yes, 1);
  EXPECT_EQ(r.ms->tally(p, 2, "t"), ProposalStatus::Failed);
  EXPECT_EQ(r.mixer->pre_deposit(d).state, DepositState::Admitted);
}

TEST(MultiSig, ApproveMotionAdmitsOnlyWhenPassed) {
  Rig r(3, MixerMode::ApprovalNecessary);
  auto d0 = r.deposit(), d1 = r.deposit();
  auto p0 = r.ms->propose(v(0), d0, Motion::approve(), 1);
  r.ms->vote(v(1), p0, Ballot::Yes, 1);
  EXPECT_EQ(r.ms->tally(p0, 1, "t"), ProposalStatus::Passed);
  EXPECT_EQ(r.mixer->pre_deposit(d0).state, DepositState::Admitted);
  auto p1 = r.ms->propose(v(0), d1, Motion::approve(), 1);
  EXPECT_EQ(r.ms->tally(p1, 2, "t"), ProposalStatus::Failed);
  EXPECT_EQ(r.mixer->pre_deposit(d1).state, DepositState::Pending);
}

TEST(MultiSig, RemovedVotersDoNotCount) {
  Rig r(3);
  auto d = r.deposit();
  r.ms->freeze_deposit(v(0), d, 1);
  auto p = r.ms->propose(v(0), d, Motion::refund(), 1);
  r.ms->vote(v(1), p, Ballot::Yes, 1);
  r.ms->remove_verifier(AccountId("manager"), v(1), 2);
  r.ms->add_verifier(AccountId("manager"), v(9), 2);
  EXPECT_TRUE(r.ms->proposal(p).roster_changed);
  EXPECT_EQ(r.ms->tally(p, 3, "t"), ProposalStatus::Failed);
}

TEST(MultiSig, ConfiscationDisabled) {
  Rig r(1);
  auto d = r.deposit();
  r.ms->freeze_deposit(v(0), d, 1);
  EXPECT_EQ(error_code([&] { r.ms->propose(v(0), d, Motion::confiscate(AccountId("victim")), 1); }),
            Errc::ConfiscationDisabled);
  Rig c(1, MixerMode::ConstantTime, true);
  auto dc = c.deposit();
  c.ms->freeze_deposit(v(0), dc, 1);
  auto p = c.ms->propose(v(0), dc, Motion::confiscate(AccountId("victim")), 1);
  EXPECT_EQ(c.ms->tally(p, 1, "t"), ProposalStatus::Passed);
  EXPECT_EQ(c.chain.balance(AccountId("victim")), 1u);
}

TEST(MultiSig, ExpiryFailsOpen) {
  Rig r(3, MixerMode::ConstantTime, false, Tick{5});
  auto d = r.deposit();
  r.ms->freeze_deposit(v(0), d, 1);
  auto p = r.ms->propose(v(0), d, Motion::refund(), 1);
  r.ms->vote(v(1), p, Ballot::Yes, 2);
  r.chain.advance_to(6);
  r.ms->on_tick(6);
  EXPECT_EQ(r.ms->proposal(p).status, ProposalStatus::Open);
  r.chain.advance_to(7);
  r.ms->on_tick(7);
  EXPECT_EQ(r.ms->proposal(p).status, ProposalStatus::Failed);
  EXPECT_TRUE(r.ms->proposal(p).expired);
  EXPECT_EQ(r.mixer->pre_deposit(d).state, DepositState::Admitted);
}

TEST(MultiSig, AccessAndStateErrors) {
  Rig r(2);
  auto d = r.deposit();
  EXPECT_EQ(error_code([&] { r.ms->freeze_deposit(AccountId("alice"), d, 1); }), Errc::Unauthorized);
  EXPECT_EQ(error_code([&] { r.ms->propose(v(0), d, Motion::refund(), 1); }), Errc::WrongState);
  r.ms->freeze_deposit(v(0), d, 1);
  auto p = r.ms->propose(v(0), d, Motion::refund(), 1);
  EXPECT_EQ(error_code([&] { r.ms->propose(v(1), d, Motion::refund(), 1); }), Errc::ProposalExists);
  EXPECT_EQ(error_code([&] { r.ms->unfreeze_deposit(v(1), d, 1); }), Errc::ProposalExists);
  EXPECT_EQ(error_code([&] { r.ms->vote(v(0), p, Ballot::No, 1); }), Errc::AlreadyVoted);
  EXPECT_EQ(error_code([&] { r.ms->vote(AccountId("alice"), p, Ballot::No, 1); }), Errc::Unauthorized);
  EXPECT_EQ(error_code([&] { r.ms->add_verifier(v(0), v(5), 1); }), Errc::Unauthorized);
  EXPECT_EQ(error_code([&] { r.ms->add_verifier(AccountId("manager"), v(1), 1); }), Errc::DuplicateVerifier);
  EXPECT_EQ(error_code([&] { r.ms->remove_verifier(AccountId("manager"), v(7), 1); }), Errc::NoSuchVerifier);
  r.ms->vote(v(1), p, Ballot::Yes, 1);
  r.ms->tally(p, 2, "t");
  EXPECT_EQ(error_code([&] { r.ms->vote(v(1), p, Ballot::Yes, 2); }), Errc::ProposalClosed);
  EXPECT_EQ(error_code([&] { r.ms->tally(p, 2, "t"); }), Errc::ProposalClosed);
  EXPECT_EQ(error_code([&] { r.ms->tally(42, 2, "t"); }), Errc::NoSuchProposal);
}

TEST(MultiSig, GasPerOperation) {
  Rig r(2);
  auto d = r.deposit();
  r.ms->freeze_deposit(v(0), d, 1);
  auto p = r.ms->propose(v(0), d, Motion::refund(), 1);
  r.ms->vote(v(1), p, Ballot::Yes, 1);
  r.ms->tally(p, 1, "t");
  r.ms->add_verifier(AccountId("manager"), v(3), 2);
  r.ms->remove_verifier(AccountId("manager"), v(3), 2);
  EXPECT_EQ(r.chain.gas().total_gas(), 102'299u + 154'033u + 52'521u + 50'295u + 53'039u + 31'106u);
}

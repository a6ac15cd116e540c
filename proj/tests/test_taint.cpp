#include "zkmixer/taint.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace zkmixer;

namespace {

struct Rig {
  SimChain chain;
  TaintTracker taint;
  std::shared_ptr<const HashScheme> scheme = default_hash_scheme();
  std::mt19937_64 rng{12};

  Rig() {
    chain.subscribe([this](const Transfer& t) { taint.observe(t); });
    chain.create_account(AccountId("thief"), 4);
    chain.create_account(AccountId("clean"), 4);
    chain.create_account(AccountId("escrow"), 0);
    taint.taint_account(AccountId("thief"), "stolen", 4);
    taint.track_lots(AccountId("escrow"));
  }
};

}  // namespace

TEST(Taint, ProportionalOnOrdinaryAccounts) {
  Rig r;
  r.chain.transfer(AccountId("thief"), AccountId("clean"), 2, "thief");
  EXPECT_EQ(r.taint.tainted(AccountId("clean")), Rational(2));
  // clean now holds 6 units of which 2 are tainted; moving 3 carries 1
  r.chain.transfer(AccountId("clean"), AccountId("x"), 3, "clean");
  EXPECT_EQ(r.taint.tainted(AccountId("x")), Rational(1));
  EXPECT_EQ(r.taint.tainted(AccountId("clean")), Rational(1));
  EXPECT_TRUE(r.taint.conserved());
  EXPECT_EQ(r.taint.taint_of(AccountId("x")).at("stolen"), Rational(1));
}

TEST(Taint, LotsFollowTheirNote) {
  Rig r;
  auto bad = make_note(*r.scheme, r.rng), good = make_note(*r.scheme, r.rng);
  r.taint.register_note(bad);
  r.taint.register_note(good);
  r.chain.transfer(AccountId("thief"), AccountId("escrow"), 1, "thief", LotRef{LotRef::Kind::Commitment, bad.commitment.value});
  r.chain.transfer(AccountId("clean"), AccountId("escrow"), 1, "clean", LotRef{LotRef::Kind::Commitment, good.commitment.value});
  EXPECT_EQ(r.taint.lot_taint(AccountId("escrow"), bad.commitment), Rational(1));
  EXPECT_EQ(r.taint.lot_taint(AccountId("escrow"), good.commitment), Rational(0));

  // withdrawing the clean note by nullifier leaves all taint behind
  r.chain.transfer(AccountId("escrow"), AccountId("out1"), 1, "w", LotRef{LotRef::Kind::Nullifier, good.nullifier});
  EXPECT_EQ(r.taint.tainted(AccountId("out1")), Rational(0));
  EXPECT_EQ(r.taint.escrow_taint(AccountId("escrow")), Rational(1));
  r.chain.transfer(AccountId("escrow"), AccountId("out2"), 1, "w", LotRef{LotRef::Kind::Nullifier, bad.nullifier});
  EXPECT_EQ(r.taint.tainted(AccountId("out2")), Rational(1));
  EXPECT_TRUE(r.taint.conserved());
  EXPECT_TRUE(r.taint.anomalies().empty());
}

TEST(Taint, UnknownNullifierSpreadsAndIsReported) {
  Rig r;
  auto bad = make_note(*r.scheme, r.rng);
  r.chain.transfer(AccountId("thief"), AccountId("escrow"), 2, "thief", LotRef{LotRef::Kind::Commitment, bad.commitment.value});
  r.chain.transfer(AccountId("clean"), AccountId("escrow"), 2, "clean", LotRef{LotRef::Kind::Commitment, r.scheme->field().element(9)});
  r.chain.transfer(AccountId("escrow"), AccountId("out"), 1, "w", LotRef{LotRef::Kind::Nullifier, bad.nullifier});
  EXPECT_EQ(r.taint.tainted(AccountId("out")), Rational(1, 2));
  EXPECT_EQ(r.taint.anomalies().size(), 1u);
  EXPECT_TRUE(r.taint.conserved());
}

TEST(Taint, ConservedUnderRandomTransfers) {
  Rig r;
  std::vector<AccountId> ids{AccountId("thief"), AccountId("clean"), AccountId("p"), AccountId("q")};
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    const auto& from = ids[rng() % ids.size()];
    const auto& to = ids[rng() % ids.size()];
    const Amount bal = r.chain.has_account(from) ? r.chain.balance(from) : 0;
    if (bal == 0 || from == to) continue;
    r.chain.transfer(from, to, 1 + rng() % bal, "x");
  }
  EXPECT_TRUE(r.taint.conserved());
  Rational sum = 0;
  for (const auto& id : ids) {
    if (r.chain.has_account(id)) {
      EXPECT_LE(r.taint.tainted(id), Rational(r.chain.balance(id)));
      sum += r.taint.tainted(id);
    }
  }
  EXPECT_EQ(sum, Rational(4));
}

from fractions import Fraction
from pathlib import Path

import pytest

import zkmixer


def test_delay_examples():
    assert zkmixer.compute_delay("linear", 8, 5, 24) == 72
    assert zkmixer.compute_delay("exponential", 8, 5, 24) == 192
    assert zkmixer.compute_delay("linear", 3, 5, 24) == 24
    assert zkmixer.compute_delay("linear", 4, Fraction(5, 3), 24) == 56


FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_hash_matches_reference_vectors():
    rows = [l.split() for l in (FIXTURES / "sponge_vectors.txt").read_text().splitlines() if l and l[0] != "#"]
    assert len(rows) > 20
    for a, b, out in rows:
        assert zkmixer.hash2(a, b) == out


def test_merkle_matches_reference_vectors():
    for line in (FIXTURES / "merkle_vectors.txt").read_text().splitlines():
        if not line or line[0] == "#":
            continue
        depth, n, root = line.split()
        assert zkmixer.merkle_root([format(i, "x") for i in range(1, int(n) + 1)], int(depth)) == root


def test_merkle_root_changes_with_leaves():
    empty = zkmixer.merkle_root([], 4)
    one = zkmixer.merkle_root(["1"], 4)
    assert empty != one
    assert one == zkmixer.merkle_root(["1"], 4)


def test_session_lifecycle():
    s = zkmixer.Session(mode="constant_time", lock=3, seed=7)
    s.create_account("alice", 1)
    s.advance(1)
    note = s.deposit("alice")
    assert note["unlock_tick"] == 4
    with pytest.raises(zkmixer.ZkMixerError) as err:
        s.approve(note["id"], "alice")
    assert err.value.code == "StillLocked"
    s.advance(4)
    s.approve(note["id"], "alice")
    assert s.state(note["id"]) == "Admitted"
    s.advance(5)
    s.withdraw(note, "fresh")
    assert s.balance("fresh") == 1
    with pytest.raises(zkmixer.ZkMixerError) as err:
        s.withdraw(note, "again")
    assert err.value.code == "NullifierSpent"
    assert s.total_gas == 102_299 + 452_440 + 279_198


def test_freeze_and_refund():
    s = zkmixer.Session(lock=10)
    s.create_account("mallory", 1)
    s.advance(1)
    note = s.deposit("mallory")
    s.freeze(note["id"])
    s.refund(note["id"])
    assert s.state(note["id"]) == "Refunded"
    assert s.balance("mallory") == 1


def test_bundled_scenarios():
    names = zkmixer.list_scenarios()
    assert "fig3_poi_bypass" in names and "zk_attack_defended" in names
    base = zkmixer.run_scenario("fig3_poi_bypass")
    defended = zkmixer.run_scenario("zk_attack_defended")
    assert base["attack"]["verdict"] == "AttackSucceeded"
    assert defended["attack"]["verdict"] == "AttackBlocked"
    assert defended["attack"]["stage"] == "FirstDeposit"


def test_seeded_runs_are_deterministic():
    a = zkmixer.run_scenario("burst_freeze", seed=11)
    b = zkmixer.run_scenario("burst_freeze", seed=11)
    assert a["seed"] == 11
    assert a["events"]["digest"] == b["events"]["digest"]


def test_random_scenario_round_trip():
    script = zkmixer.random_scenario(3)
    report = zkmixer.run_scenario(script)
    assert all(i["passed"] for i in report["invariants"])


def test_gas_report():
    g = zkmixer.gas_report()
    assert g["deployment"]["total_usd"] == "$21.22"
    assert [l["usd"] for l in g["operations"]["lines"]][:3] == ["$0.20", "$0.56", "$0.90"]


def test_bad_scenario_raises():
    with pytest.raises(zkmixer.ZkMixerError) as err:
        zkmixer.run_scenario("{not json")
    assert err.value.code == "ParseError"

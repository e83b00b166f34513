import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from streamspec.abp import (
    AbpTrace,
    DataPacket,
    OracleStream,
    RoundRecord,
    abp_network,
    check_all,
    fairness_check,
    make_receiver,
    make_sender,
    medium_apply,
    medium_relation_check,
    overall_check,
    receiver_spec_check,
    sender_spec_check,
    simulate_abp,
)
from streamspec.errors import MalformedTrace
from streamspec.spf import fixpoint_solve
from streamspec.stream import Fin, Stream, epsilon

S = Stream.of
T, F = True, False
ALL_TRUE = OracleStream.constant(True)


def sim(data, bit=False, data_oracle=None, ack_oracle=None, max_rounds=1000):
    return simulate_abp(data, bit, data_oracle or OracleStream.constant(True),
                        ack_oracle or OracleStream.constant(True), max_rounds)


# --- oracles and media ----------------------------------------------------

def test_seeded_oracle_reproducible():
    a = OracleStream.seeded(5, 0.3).prefix(500)
    b = OracleStream.seeded(5, 0.3).prefix(500)
    assert a == b
    assert OracleStream.seeded(6, 0.3).prefix(500) != a


def test_oracle_density_validated():
    for bad in (0, -0.1, 1.5):
        with pytest.raises(ValueError):
            OracleStream.seeded(1, bad)


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.5, 0.7, 1.0])
def test_periodic_oracle_fairness_window(theta):
    bits = OracleStream.periodic(theta).prefix(2000)
    w = OracleStream.fairness_window(theta)
    assert all(any(bits[k:k + w]) for k in range(len(bits) - w))
    assert abs(sum(bits) / len(bits) - theta) < 0.01


def test_medium_apply_examples():
    assert medium_apply(S("a", "b", "c"), OracleStream.cyclic((T, F, T))) == S("a", "c")
    assert medium_apply(S(1, 2, 3), ALL_TRUE) == S(1, 2, 3)
    assert medium_apply(S("a", "b"), OracleStream.cyclic((F, F), (T,))) == epsilon()


def test_medium_relation_examples():
    v = medium_relation_check(S("a", "b", "c"), S("a", "c"))
    assert v.holds and v.witness == (T, F, T)
    assert not medium_relation_check(S("a", "b"), S("b", "a"))
    assert not medium_relation_check(S("a"), S("a", "a"))


@given(st.lists(st.integers(0, 3), max_size=30), st.integers(0, 1000))
def test_medium_relation_witness_reproduces_output(xs, seed):
    out = medium_apply(Stream(xs), OracleStream.seeded(seed, 0.5))
    v = medium_relation_check(Stream(xs), out)
    assert v.holds
    assert medium_apply(Stream(xs), Stream(v.witness)) == out


def test_fairness_examples():
    p = OracleStream.cyclic((T, F, T, F, F, T, F, F, T, F), (F,))
    rep = fairness_check(p, Stream(range(10)), 50)
    assert rep.output_length == 4 and rep.true_count == 4 and rep.passed
    rep = fairness_check(ALL_TRUE, Stream(range(10)), 50)
    assert rep.output_length == 10 and rep.passed
    assert rep.projection_lengths == (Fin(10), Fin(10), Fin(10))


def test_fairness_seed_42():
    p = OracleStream.seeded(42, 0.5)
    # independent count: regenerate the bits with a fresh generator
    rng = random.Random(42)
    expected = sum(rng.random() < 0.5 for _ in range(100))
    assert sum(p.prefix(100)) == expected
    rep = fairness_check(p, Stream(range(100)), 200)
    assert rep.output_length == expected and rep.passed


# --- sender and receiver --------------------------------------------------

def test_sender_behaviour():
    s = make_sender(False)
    s.offer(["d1", "d2"])
    assert s.emit() == DataPacket("d1", False)
    assert not s.receive_ack(True)
    assert s.emit() == DataPacket("d1", False)
    assert s.receive_ack(False)
    assert s.emit() == DataPacket("d2", True)


def test_receiver_behaviour():
    r = make_receiver()
    assert r.receive(DataPacket("d1", False)) == (False, ("d1",))
    assert r.receive(DataPacket("d1", False)) == (False, ())
    assert r.receive(DataPacket("d2", True)) == (True, ("d2",))


# --- simulation -----------------------------------------------------------

def test_simulate_single_datum_clean():
    tr = sim(["d1"])
    assert tr.o == S("d1")
    assert tr.ds == S(DataPacket("d1", False))
    assert tr.as_ == S(False)
    assert tr.completed and tr.rounds == 1


def test_simulate_first_transmission_dropped():
    tr = sim(["d1"], data_oracle=OracleStream.cyclic((F,), (T,)))
    assert tr.o == S("d1")
    assert tr.ds.to_tuple().count(DataPacket("d1", False)) >= 2
    assert tr.rounds == 2


def test_simulate_empty_input():
    tr = sim([])
    assert tr.rounds == 0 and tr.completed
    for ch in (tr.ds, tr.dr, tr.ar, tr.as_, tr.o):
        assert ch == epsilon()


def test_simulate_rejects_zero_rounds():
    with pytest.raises(ValueError):
        sim([1], max_rounds=0)


def test_truncated_run_is_prefix_safe():
    tr = sim([1, 2, 3, 4, 5], data_oracle=OracleStream.seeded(3, 0.2), max_rounds=6)
    assert not tr.completed
    assert overall_check(tr).passed
    assert len(tr.o.to_tuple()) < 5


def test_completed_run_delivers_everything():
    tr = sim([1, 2, 3, 4, 5], data_oracle=OracleStream.seeded(3, 0.4), ack_oracle=OracleStream.seeded(4, 0.4))
    assert tr.completed and tr.o == S(1, 2, 3, 4, 5)
    assert overall_check(tr).passed


payloads = st.lists(st.integers(0, 3), max_size=20)


@settings(max_examples=150, deadline=None)
@given(payloads, st.booleans(), st.integers(0, 10**6), st.integers(0, 10**6),
       st.floats(0.1, 1.0), st.floats(0.1, 1.0), st.integers(1, 300))
def test_every_trace_meets_every_check(data, bit, sd, sa, td, ta, rounds):
    tr = simulate_abp(data, bit, OracleStream.seeded(sd, td), OracleStream.seeded(sa, ta), rounds)
    rep = check_all(tr)
    assert rep.passed, rep.failed()
    assert len(rep.verdicts) == 10


# --- mutations ------------------------------------------------------------

def base_trace():
    return sim([1, 2, 3], data_oracle=OracleStream.cyclic((T, F, T, T)))


def test_mutation_ds_reordered():
    tr = base_trace()
    log = tr.log
    a = next(k for k, r in enumerate(log) if r.ds.payload == 1)
    b = next(k for k, r in enumerate(log) if r.ds.payload == 2)
    log[a], log[b] = log[a]._replace(ds=log[b].ds), log[b]._replace(ds=log[a].ds)
    assert not sender_spec_check(tr).verdicts["sender.1"]


def test_mutation_fresh_data_share_bit():
    tr = sim([1, 2])
    tr.log[1] = tr.log[1]._replace(ds=DataPacket(2, tr.log[0].ds.bit))
    assert not sender_spec_check(tr).verdicts["sender.3"]


def test_mutation_sender_gives_up():
    tr = sim([1, 2], data_oracle=OracleStream.cyclic((F,), (T,)))
    # sender moves on to datum 2 after a dropped packet, with no ack
    tr.log[1] = RoundRecord(DataPacket(2, True))
    tr.log[2:] = []
    rep = sender_spec_check(tr)
    assert not rep.verdicts["sender.5"]


def test_mutation_sender_stalls_after_ack():
    tr = sim([1, 2, 3])
    del tr.log[1]
    tr.log.append(RoundRecord())
    rep = sender_spec_check(tr)
    assert not rep.verdicts["sender.4"]


def test_mutation_missing_ack():
    tr = sim([1, 2])
    tr.log[0] = tr.log[0]._replace(ar=None, as_=None)
    assert not receiver_spec_check(tr).verdicts["receiver.1"]


def test_mutation_duplicate_delivery():
    tr = sim([1], data_oracle=ALL_TRUE, ack_oracle=OracleStream.cyclic((F,), (T,)))
    assert tr.rounds == 2
    tr.log[1] = tr.log[1]._replace(o=(1,))
    rep = receiver_spec_check(tr)
    assert not rep.verdicts["receiver.2"]
    assert not overall_check(tr).passed


def test_mutation_foreign_datum():
    tr = sim([1, 2])
    tr.log[1] = tr.log[1]._replace(o=(99,))
    assert not overall_check(tr).passed


def test_malformed_trace():
    tr = sim([1])
    tr.log[0] = tr.log[0]._replace(ar="yes")
    with pytest.raises(MalformedTrace):
        receiver_spec_check(tr)
    with pytest.raises(MalformedTrace):
        sender_spec_check(AbpTrace((1,), [RoundRecord(ds=(1, "x"))]))


# --- network form ---------------------------------------------------------

def test_abp_network_fixpoint_all_true():
    net = abp_network(ALL_TRUE, ALL_TRUE, initial_bit=False)
    res = fixpoint_solve(net, {"i": S("d1")}, max_rounds=50)
    assert res.converged
    assert res.channels["o"] == S("d1")
    assert res.channels["ds"] == S(DataPacket("d1", False))


def test_abp_network_longer_input():
    net = abp_network(ALL_TRUE, ALL_TRUE, initial_bit=True)
    res = fixpoint_solve(net, {"i": S(1, 2, 3)}, max_rounds=100)
    assert res.converged and res.channels["o"] == S(1, 2, 3)
    hist = [h["o"] for h in res.history]
    assert all(b[: len(a)] == a for a, b in zip(hist, hist[1:]))


def test_oracle_window_helper():
    assert OracleStream.fairness_window(0.1) == math.ceil(10 / 0.1)

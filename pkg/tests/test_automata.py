import pytest
from hypothesis import given, strategies as st

from streamspec.automata import (
    Bid,
    Ioa,
    Transition,
    bisimilar,
    build_auction,
    choose,
    ioafp,
    rename_states,
    run,
    step,
    validate,
)
from streamspec.errors import AlphabetMismatch, AutomatonError, StuckError
from streamspec.spf import check_monotone
from streamspec.stream import Stream, epsilon
from streamspec.timed import TICK, Msg

S = Stream.of


def bid(b):
    return Msg(Bid(b))


def echo():
    return Ioa.build(["s0"], [1, 2], [1, 2], [("s0", 1, "s0", (1,)), ("s0", 2, "s0", (2,))], [("s0", ())])


def twice():
    return Ioa.build(["t0"], [1, 2], [1, 2], [("t0", 1, "t0", (1, 1)), ("t0", 2, "t0", (2, 2))], [("t0", ())])


def reference_auction(timeout, inputs):
    """Direct countdown simulation, independent of the automaton encoding."""
    remaining, last, out = timeout, None, []
    for x in inputs:
        if remaining == 0:
            continue
        if x is TICK:
            remaining -= 1
            if remaining == 0 and last is not None:
                out.append(last)
        else:
            last = x.value.bidder
    return tuple(out)


def test_validate_auction():
    rep = validate(build_auction(3, "AB"))
    assert rep.well_defined and rep.deterministic and rep.complete


def test_validate_nondeterminism_witness():
    a = Ioa.build(["s0"], ["x"], [0], [("s0", "x", "s0", ()), ("s0", "x", "s0", (0,))], [("s0", ())])
    rep = validate(a)
    assert not rep.deterministic
    assert set(rep.nondeterministic[0]) == {Transition("s0", "x", "s0", ()), Transition("s0", "x", "s0", (0,))}


def test_validate_missing_witness():
    a = Ioa.build(["s0"], ["x", "y"], [], [("s0", "x", "s0", ())], [("s0", ())])
    rep = validate(a)
    assert not rep.complete and rep.missing == [("s0", "y")]


def test_validate_ill_formed():
    a = Ioa.build(["s0"], ["x"], [], [("s0", "x", "s9", ("z",))], [("s1", ())])
    rep = validate(a)
    assert not rep.well_defined
    assert len(rep.ill_formed) == 3


def test_step():
    assert step(echo(), "s0", 2) == ("s0", (2,))
    nd = Ioa.build(["s0", "s1"], ["x"], [0], [("s0", "x", "s0", ()), ("s0", "x", "s1", (0,))], [("s0", ())])
    assert step(nd, "s0", "x", choose(1)) == ("s1", (0,))
    with pytest.raises(AutomatonError):
        step(nd, "s0", "x")
    with pytest.raises(StuckError):
        step(echo(), "s0", 99)


def test_ioafp_examples():
    assert ioafp(echo())(S(1, 2)) == S(1, 2)
    hello = Ioa.build(["s"], ["x"], ["hello"], [("s", "x", "s", ())], [("s", ("hello",))])
    assert ioafp(hello)(epsilon()) == S("hello")
    out = ioafp(build_auction(3, "AB"))(S(bid("A"), TICK, bid("B"), TICK, TICK))
    assert out == S("B")


def test_ioafp_rejects_bad_automata():
    nd = Ioa.build(["s"], ["x"], [], [("s", "x", "s", ()), ("s", "x", "s", ())], [("s", ())])
    with pytest.raises(AutomatonError):
        ioafp(nd)
    inc = Ioa.build(["s"], ["x", "y"], [], [("s", "x", "s", ())], [("s", ())])
    with pytest.raises(AutomatonError):
        ioafp(inc)


def test_run_examples():
    tr = run(echo(), [1])
    assert len(tr.steps) == 1 and tr.steps[0] == Transition("s0", 1, "s0", (1,))
    empty = run(Ioa.build(["s"], ["x"], ["h"], [("s", "x", "s", ())], [("s", ("h",))]), [])
    assert empty.steps == [] and empty.initial_output == ("h",)
    holey = Ioa.build(["s", "t"], ["x"], [], [("s", "x", "t", ())], [("s", ())])
    with pytest.raises(StuckError) as exc:
        run(holey, ["x", "x"])
    assert len(exc.value.partial.steps) == 1


def test_auction_examples():
    a1 = build_auction(1, "AB")
    assert ioafp(a1)(S(TICK)) == epsilon()
    a2 = build_auction(2, "AB")
    assert ioafp(a2)(S(bid("A"), TICK)) == epsilon()
    with pytest.raises(ValueError):
        build_auction(0, "AB")


def test_auction_winner_at_third_tick():
    tr = run(build_auction(3, "AB"), [bid("A"), TICK, bid("B"), TICK, TICK])
    emitting = [k for k, s in enumerate(tr.steps) if s.out]
    assert emitting == [4]
    assert tr.steps[4].out == ("B",)
    assert tr.final_state == (0, "B")


auction_inputs = st.lists(st.one_of(st.just(TICK), st.sampled_from("AB").map(bid)), max_size=15)


@given(st.integers(1, 5), auction_inputs)
def test_auction_matches_reference(timeout, inputs):
    a = build_auction(timeout, "AB")
    assert ioafp(a)(Stream(inputs)).to_tuple() == reference_auction(timeout, inputs)
    tr = run(a, inputs)
    assert tr.output == reference_auction(timeout, inputs)
    assert len(tr.output) == len(tr.initial_output) + sum(len(s.out) for s in tr.steps)


@given(st.lists(auction_inputs, min_size=1, max_size=4))
def test_auction_ioafp_monotone(samples):
    f = ioafp(build_auction(3, "AB"))
    pairs = [(Stream(xs[: len(xs) // 2]), Stream(xs)) for xs in samples]
    assert check_monotone(f, pairs).passed


def test_bisimilar_to_renaming():
    a = echo()
    b = rename_states(a, {"s0": "r0"})
    res = bisimilar(a, b)
    assert res and res.relation == {("s0", "r0")}


def test_not_bisimilar_echo_vs_twice():
    res = bisimilar(echo(), twice())
    assert not res
    pair, letter = res.evidence
    assert pair == ("s0", "t0") and letter in (1, 2)
    assert res.word in ((1,), (2,))


def test_bisimilar_to_minimized_machine():
    # two states that behave identically, both emitting <x> per input
    two = Ioa.build(["p", "q"], [1, 2], [1, 2],
                    [("p", 1, "q", (1,)), ("p", 2, "p", (2,)), ("q", 1, "p", (1,)), ("q", 2, "q", (2,))],
                    [("p", ())])
    res = bisimilar(two, echo())
    assert res and res.relation == {("p", "s0"), ("q", "s0")}


def test_bisimilar_checks_initial_output():
    loud = Ioa.build(["s0"], [1, 2], [0, 1, 2], [("s0", 1, "s0", (1,)), ("s0", 2, "s0", (2,))], [("s0", (0,))])
    res = bisimilar(echo(), loud)
    assert not res and res.evidence[1] is None and res.word == ()


def test_bisimilar_alphabet_mismatch():
    other = Ioa.build(["s0"], [1], [1], [("s0", 1, "s0", (1,))], [("s0", ())])
    with pytest.raises(AlphabetMismatch):
        bisimilar(echo(), other)


def test_bisimilarity_is_reflexive_and_symmetric():
    a = build_auction(3, "AB")
    b = rename_states(a, lambda s: ("r",) + s)
    assert bisimilar(a, a)
    assert bisimilar(a, b) and bisimilar(b, a)

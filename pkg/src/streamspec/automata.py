"""I/O*-automata: one input message per transition, a finite output sequence per step.

An :class:`Ioa` is the 5-tuple (states, input alphabet, output alphabet,
transition relation, initial entries).  Deterministic, complete automata
lower to prefix-monotone stream-processing functions via :func:`ioafp`.
Nondeterministic ones run under an explicit index-choosing resolver.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .errors import AlphabetMismatch, AutomatonError, StuckError
from .spf import SPF
from .stream import Stream
from .timed import TICK, Msg

__all__ = [
    "Transition", "Ioa", "ValidationReport", "validate", "step", "ioafp",
    "RunTrace", "run", "BisimResult", "bisimilar", "Bid", "build_auction",
    "rename_states", "choose",
]


class Transition(NamedTuple):
    src: Hashable
    inp: Hashable
    dst: Hashable
    out: tuple = ()


Resolver = Callable[[Sequence], int]


def choose(index: int) -> Resolver:
    """A resolver that always picks the enabled alternative at ``index``."""
    return lambda options: index


@dataclass(frozen=True)
class Ioa:
    states: frozenset
    inputs: frozenset
    outputs: frozenset
    delta: tuple[Transition, ...]
    init: tuple[tuple[Hashable, tuple], ...]

    @classmethod
    def build(cls, states: Iterable, inputs: Iterable, outputs: Iterable,
              delta: Iterable, init: Iterable) -> "Ioa":
        return cls(
            frozenset(states), frozenset(inputs), frozenset(outputs),
            tuple(Transition(s, x, d, tuple(o)) for s, x, d, o in delta),
            tuple((s, tuple(o)) for s, o in init),
        )

    @cached_property
    def table(self) -> Mapping[tuple, list[Transition]]:
        t: dict[tuple, list[Transition]] = defaultdict(list)
        for tr in self.delta:
            t[(tr.src, tr.inp)].append(tr)
        return dict(t)

    def enabled(self, state, message) -> list[Transition]:
        return self.table.get((state, message), [])


@dataclass
class ValidationReport:
    well_defined: bool
    deterministic: bool
    complete: bool
    ill_formed: list[str] = field(default_factory=list)
    nondeterministic: list[tuple] = field(default_factory=list)
    missing: list[tuple] = field(default_factory=list)


def validate(a: Ioa) -> ValidationReport:
    problems = []
    for tr in a.delta:
        if tr.src not in a.states or tr.dst not in a.states:
            problems.append(f"transition {tr} leaves the state set")
        if tr.inp not in a.inputs:
            problems.append(f"transition {tr} reads a foreign input")
        if any(o not in a.outputs for o in tr.out):
            problems.append(f"transition {tr} writes a foreign output")
    for s, out in a.init:
        if s not in a.states:
            problems.append(f"start state {s!r} not in the state set")
        if any(o not in a.outputs for o in out):
            problems.append(f"initial output {out!r} writes a foreign output")
    if not a.init:
        problems.append("no start state")

    ambiguous = [tuple(trs) for trs in a.table.values() if len(trs) > 1]
    if len(a.init) > 1:
        ambiguous.append(tuple(a.init))
    missing = [(s, x) for s in a.states for x in a.inputs if (s, x) not in a.table]
    return ValidationReport(
        well_defined=not problems,
        deterministic=not ambiguous,
        complete=not missing,
        ill_formed=problems,
        nondeterministic=ambiguous,
        missing=missing,
    )


def step(a: Ioa, state, message, resolver: Resolver | None = None):
    """Fire one transition; returns ``(next_state, output)``."""
    options = a.enabled(state, message)
    if not options:
        raise StuckError(state, message)
    if len(options) == 1:
        tr = options[0]
    else:
        if resolver is None:
            raise AutomatonError(f"{len(options)} transitions enabled from {state!r} on {message!r} and no resolver given")
        tr = options[resolver(options)]
    return tr.dst, tr.out


def _start(a: Ioa, resolver: Resolver | None):
    if len(a.init) == 1:
        return a.init[0]
    if not a.init:
        raise AutomatonError("automaton has no start state")
    if resolver is None:
        raise AutomatonError("several start entries and no resolver given")
    return a.init[resolver(a.init)]


def ioafp(a: Ioa) -> SPF:
    """Lower a deterministic, complete automaton to a stream-processing function."""
    rep = validate(a)
    if not rep.deterministic:
        raise AutomatonError(f"automaton is not deterministic: {rep.nondeterministic[:3]}")
    if not rep.complete:
        raise AutomatonError(f"automaton is not complete: missing {rep.missing[:3]}")
    start, initial = a.init[0]
    table = {key: trs[0] for key, trs in a.table.items()}

    def apply(s: Stream) -> Stream:
        def gen():
            yield from initial
            state = start
            for x in s:
                tr = table[(state, x)]
                state = tr.dst
                yield from tr.out
        return Stream(gen())

    return SPF(apply, "automaton", "ioafp")


@dataclass
class RunTrace:
    start: Hashable
    initial_output: tuple
    steps: list[Transition] = field(default_factory=list)

    @property
    def output(self) -> tuple:
        out = list(self.initial_output)
        for tr in self.steps:
            out.extend(tr.out)
        return tuple(out)

    @property
    def final_state(self):
        return self.steps[-1].dst if self.steps else self.start


def run(a: Ioa, inputs: Iterable, resolver: Resolver | None = None) -> RunTrace:
    """Execute ``a`` on a finite input, recording every fired transition.

    A :class:`StuckError` raised midway carries the partial trace in ``.partial``.
    """
    start, initial = _start(a, resolver)
    trace = RunTrace(start, tuple(initial))
    state = start
    for x in inputs:
        try:
            dst, out = step(a, state, x, resolver)
        except StuckError as e:
            e.partial = trace
            raise
        trace.steps.append(Transition(state, x, dst, out))
        state = dst
    return trace


@dataclass
class BisimResult:
    bisimilar: bool
    relation: frozenset = frozenset()
    evidence: tuple | None = None
    word: tuple | None = None

    def __bool__(self):
        return self.bisimilar


def _reachable(a: Ioa) -> set:
    seen = {s for s, _ in a.init}
    todo = list(seen)
    while todo:
        s = todo.pop()
        for x in a.inputs:
            for tr in a.enabled(s, x):
                if tr.dst not in seen:
                    seen.add(tr.dst)
                    todo.append(tr.dst)
    return seen


def _moves(a: Ioa, s, x) -> dict[tuple, set]:
    by_out: dict[tuple, set] = defaultdict(set)
    for tr in a.enabled(s, x):
        by_out[tr.out].add(tr.dst)
    return by_out


def _transfer_fails(a: Ioa, b: Ioa, p, q, rel: set):
    """First input on which the pair (p, q) cannot match each other's moves, else None."""
    for x in sorted(a.inputs, key=repr):
        ma, mb = _moves(a, p, x), _moves(b, q, x)
        if set(ma) != set(mb):
            return x
        for out, dsts in ma.items():
            if not all(any((d, e) in rel for e in mb[out]) for d in dsts):
                return x
            if not all(any((d, e) in rel for d in dsts) for e in mb[out]):
                return x
    return None


def bisimilar(a: Ioa, b: Ioa) -> BisimResult:
    """Decide bisimilarity of two finite automata.

    Starts from all pairs of reachable states and repeatedly removes pairs
    that cannot match each other's per-input (output, successor) moves,
    giving the coarsest bisimulation.  The start entries must then be related
    with equal initial outputs in both directions.  On success ``relation``
    holds the pairs reachable from related start pairs; on failure
    ``evidence`` is ``((p, q), input)``, with ``input=None`` when the start
    entries disagree on initial output.
    """
    if a.inputs != b.inputs:
        raise AlphabetMismatch(f"input alphabets differ: {set(a.inputs) ^ set(b.inputs)}")
    ra, rb = _reachable(a), _reachable(b)
    rel = {(p, q) for p in ra for q in rb}
    killed: dict[tuple, object] = {}
    changed = True
    while changed:
        changed = False
        for pair in list(rel):
            x = _transfer_fails(a, b, pair[0], pair[1], rel)
            if x is not None:
                rel.discard(pair)
                killed[pair] = x
                changed = True

    def related_start(p, out, others, flip):
        return any(o == out and (((q, p) if flip else (p, q)) in rel) for q, o in others)

    for p, out in a.init:
        if not related_start(p, out, b.init, False):
            ev = _start_evidence(p, out, b.init, killed, False)
            return BisimResult(False, evidence=ev, word=_distinguishing_word(a, b))
    for q, out in b.init:
        if not related_start(q, out, a.init, True):
            ev = _start_evidence(q, out, a.init, killed, True)
            return BisimResult(False, evidence=ev, word=_distinguishing_word(a, b))

    # restrict to the part reachable by matched moves from related start pairs
    frontier = [(p, q) for p, o in a.init for q, o2 in b.init if o == o2 and (p, q) in rel]
    keep = set(frontier)
    while frontier:
        p, q = frontier.pop()
        for x in a.inputs:
            mb = _moves(b, q, x)
            for out, dsts in _moves(a, p, x).items():
                for d in dsts:
                    for e in mb.get(out, ()):
                        if (d, e) in rel and (d, e) not in keep:
                            keep.add((d, e))
                            frontier.append((d, e))
    return BisimResult(True, relation=frozenset(keep))


def _start_evidence(p, out, others, killed, flip):
    for q, o in others:
        pair = (q, p) if flip else (p, q)
        if o != out:
            continue
        return pair, killed.get(pair)
    q = others[0][0]
    return ((q, p) if flip else (p, q)), None


def _distinguishing_word(a: Ioa, b: Ioa):
    """Shortest input on which two deterministic machines' outputs differ, if any."""
    if len(a.init) != 1 or len(b.init) != 1:
        return None
    (p0, oa), (q0, ob) = a.init[0], b.init[0]
    if oa != ob:
        return ()
    seen = {(p0, q0)}
    queue = [((p0, q0), ())]
    letters = sorted(a.inputs, key=repr)
    while queue:
        (p, q), word = queue.pop(0)
        for x in letters:
            ta, tb = a.enabled(p, x), b.enabled(q, x)
            if len(ta) > 1 or len(tb) > 1:
                return None
            if not ta or not tb or ta[0].out != tb[0].out:
                return word + (x,)
            nxt = (ta[0].dst, tb[0].dst)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, word + (x,)))
    return None


def rename_states(a: Ioa, mapping: Mapping | Callable) -> Ioa:
    f = mapping if callable(mapping) else mapping.__getitem__
    return Ioa(
        frozenset(f(s) for s in a.states), a.inputs, a.outputs,
        tuple(Transition(f(t.src), t.inp, f(t.dst), t.out) for t in a.delta),
        tuple((f(s), o) for s, o in a.init),
    )


@dataclass(frozen=True)
class Bid:
    bidder: Hashable

    def __repr__(self):
        return f"Bid({self.bidder!r})"


def build_auction(timeout: int, bidders: Iterable) -> Ioa:
    """Auction component: counts ticks down from ``timeout``, remembers the last bidder.

    Inputs are ``Msg(Bid(b))`` and ``TICK``.  States are pairs
    ``(remaining, last_bidder)``.  The tick that brings the counter to zero
    announces the stored bidder (if any); afterwards every input is ignored.
    Bids never reset the countdown.
    """
    if timeout < 1:
        raise ValueError("auction timeout must be non-zero")
    bidders = tuple(bidders)
    lasts = (None,) + bidders
    states = [(r, b) for r in range(timeout + 1) for b in lasts]
    bids = [Msg(Bid(b)) for b in bidders]
    delta = []
    for r, last in states:
        for m in bids:
            if r > 0:
                delta.append(((r, last), m, (r, m.value.bidder), ()))
            else:
                delta.append(((r, last), m, (r, last), ()))
        if r > 1:
            delta.append(((r, last), TICK, (r - 1, last), ()))
        elif r == 1:
            delta.append(((r, last), TICK, (0, last), () if last is None else (last,)))
        else:
            delta.append(((r, last), TICK, (r, last), ()))
    return Ioa.build(states, bids + [TICK], bidders, delta, [((timeout, None), ())])

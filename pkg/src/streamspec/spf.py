"""Stream-processing functions, networks of them, and their fixpoint semantics.

An :class:`SPF` is a callable from one stream to another.  The element-wise
recursion pattern ``f(<x> ^ s) = out(x) ^ f(s)`` is provided by
:func:`lift_elementwise`; such functions are prefix-monotone by construction.
:func:`check_monotone` and :func:`check_approximation` test those properties
on arbitrary functions over finite samples.

A :class:`Network` wires multi-port components together through named
channels, feedback allowed.  :func:`fixpoint_solve` computes its meaning by
Kleene iteration: all channels start empty and every round re-evaluates every
component on the current channel contents until nothing grows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NonTerminatingComponent, WiringError
from .stream import Stream, Verdict, _lift, prefix_le

log = logging.getLogger(__name__)

__all__ = [
    "SPF", "lift_elementwise", "compose_serial", "interleave",
    "Component", "Network", "FixpointResult", "fixpoint_solve",
    "MonotoneReport", "ApproximationReport", "check_monotone", "check_approximation",
]

KINDS = ("elementwise", "composed", "automaton", "user")


class SPF:
    """A stream-processing function with a provenance tag.

    ``kind`` is one of ``elementwise``, ``composed``, ``automaton`` or ``user``.
    """

    __slots__ = ("_apply", "kind", "name")

    def __init__(self, apply: Callable[[Stream], Stream], kind: str = "user", name: str | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown SPF kind {kind!r}")
        self._apply = apply
        self.kind = kind
        self.name = name or getattr(apply, "__name__", "spf")

    def __call__(self, s) -> Stream:
        return _lift(self._apply(_lift(s)))

    def __rshift__(self, other: "SPF") -> "SPF":
        return compose_serial(self, other)

    def __repr__(self):
        return f"SPF({self.name}, kind={self.kind})"


def lift_elementwise(out: Callable[[object], Iterable], name: str | None = None) -> SPF:
    """The function consuming one message at a time and emitting ``out(x)`` for it."""

    def apply(s: Stream) -> Stream:
        def gen():
            for x in s:
                yield from out(x)
        return Stream(gen())

    return SPF(apply, "elementwise", name or getattr(out, "__name__", "lifted"))


def compose_serial(f: SPF, g: SPF) -> SPF:
    """``g`` after ``f``; evaluation stays lazy end to end."""
    return SPF(lambda s: g(f(s)), "composed", f"{f.name}>>{g.name}")


def interleave(a: Stream, b: Stream) -> Stream:
    """``a0 b0 a1 b1 ...``, stopping at the first missing element.

    Monotone in both arguments, which makes it a safe merge point for
    feedback loops (unlike concatenation, which is not monotone in its first
    argument).
    """
    a, b = _lift(a), _lift(b)

    def gen():
        i = 0
        while a._has(i):
            yield a._buf[i]
            if not b._has(i):
                return
            yield b._buf[i]
            i += 1

    return Stream(gen())


@dataclass(frozen=True)
class Component:
    """A network node.

    ``fn`` receives one stream per entry of ``inputs`` (channel names) and
    returns a stream, or a tuple of streams matching ``outputs``.  Optional
    ``in_types``/``out_types`` give a message type per port; wiring rejects a
    channel whose producer and consumer declare different types.
    """

    name: str
    fn: Callable[..., object]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    in_types: tuple | None = None
    out_types: tuple | None = None

    @classmethod
    def lift(cls, name: str, f: SPF, inp: str, out: str, msg_type=None) -> "Component":
        types = None if msg_type is None else (msg_type,)
        return cls(name, f, (inp,), (out,), types, types)

    def evaluate(self, streams: Sequence[Stream]) -> tuple[Stream, ...]:
        res = self.fn(*streams)
        if len(self.outputs) == 1 and not isinstance(res, tuple):
            res = (res,)
        if len(res) != len(self.outputs):
            raise WiringError(f"component {self.name} returned {len(res)} outputs, expected {len(self.outputs)}")
        return tuple(_lift(r) for r in res)


@dataclass(frozen=True)
class Network:
    components: tuple[Component, ...]
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()

    def channels(self) -> list[str]:
        seen = dict.fromkeys(self.inputs)
        for c in self.components:
            seen.update(dict.fromkeys(c.outputs))
            seen.update(dict.fromkeys(c.inputs))
        return list(seen)

    def validate(self) -> None:
        """Raise :class:`WiringError` unless every read channel has exactly one driver."""
        names = [c.name for c in self.components]
        if len(set(names)) != len(names):
            raise WiringError("duplicate component names")
        drivers: dict[str, str] = {ch: "<external>" for ch in self.inputs}
        types: dict[str, object] = {}
        for c in self.components:
            for k, ch in enumerate(c.outputs):
                if ch in drivers:
                    raise WiringError(f"channel {ch!r} driven by both {drivers[ch]} and {c.name}")
                drivers[ch] = c.name
                if c.out_types is not None and c.out_types[k] is not None:
                    types[ch] = c.out_types[k]
        for c in self.components:
            for k, ch in enumerate(c.inputs):
                if ch not in drivers:
                    raise WiringError(f"input port {k} of {c.name} reads undriven channel {ch!r}")
                want = None if c.in_types is None else c.in_types[k]
                have = types.get(ch)
                if want is not None and have is not None and want != have:
                    raise WiringError(f"type mismatch on channel {ch!r}: {have} vs {want}")
        for ch in self.outputs:
            if ch not in drivers:
                raise WiringError(f"external output {ch!r} is undriven")


@dataclass
class FixpointResult:
    channels: dict[str, Stream]
    converged: bool
    rounds: int
    history: list[dict[str, tuple]] = field(default_factory=list)


def fixpoint_solve(
    net: Network,
    external_inputs: Mapping[str, Iterable],
    max_rounds: int,
    max_channel_len: int = 100_000,
) -> FixpointResult:
    """Kleene iteration of ``net`` from the all-empty channel assignment.

    Each round evaluates every component on the previous round's channel
    contents (Jacobi style).  Stops with ``converged=True`` in the first round
    where no channel changes, or after ``max_rounds`` with the current
    approximation.  ``history[k]`` holds the channel contents after round
    ``k + 1``.
    """
    net.validate()
    missing = set(net.inputs) - set(external_inputs)
    if missing:
        raise WiringError(f"no stream supplied for external inputs {sorted(missing)}")
    current: dict[str, tuple] = {ch: () for ch in net.channels()}
    for ch in net.inputs:
        current[ch] = _lift(external_inputs[ch]).to_tuple()

    history: list[dict[str, tuple]] = []
    for rnd in range(1, max_rounds + 1):
        nxt = dict(current)
        for c in net.components:
            outs = c.evaluate([Stream(current[ch]) for ch in c.inputs])
            for ch, s in zip(c.outputs, outs):
                got = s.prefix(max_channel_len + 1)
                if len(got) > max_channel_len:
                    raise NonTerminatingComponent(f"{c.name} produced more than {max_channel_len} messages on {ch!r}")
                nxt[ch] = got
        history.append(nxt)
        if nxt == current:
            log.debug("fixpoint reached after %d rounds", rnd)
            return FixpointResult({ch: Stream(v) for ch, v in nxt.items()}, True, rnd, history)
        current = nxt
    return FixpointResult({ch: Stream(v) for ch, v in current.items()}, False, max_rounds, history)


@dataclass
class MonotoneReport:
    checked: int
    violations: list[tuple] = field(default_factory=list)
    unknown: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_monotone(f: SPF | Callable, samples: Iterable[tuple], budget: int = 10_000) -> MonotoneReport:
    """Check ``f(a) ⊑ f(b)`` for every sample pair ``(a, b)`` with ``a ⊑ b``.

    A violation is recorded as ``(a, b, f(a), f(b))`` with finite prefixes of
    the outputs.  Pairs whose comparison is inconclusive at ``budget`` land in
    ``unknown``.
    """
    report = MonotoneReport(0)
    for a, b in samples:
        a, b = _lift(a), _lift(b)
        fa, fb = _lift(f(a)), _lift(f(b))
        report.checked += 1
        v = prefix_le(fa, fb, budget)
        if v is Verdict.FALSE:
            report.violations.append((a.to_tuple(), b.to_tuple(), fa.prefix(budget), fb.prefix(budget)))
        elif v is Verdict.UNKNOWN:
            report.unknown.append((a.to_tuple(), b.to_tuple()))
    return report


@dataclass
class ApproximationReport:
    chain: list[tuple]
    failing_link: int | None = None
    final_matches: bool = True

    @property
    def passed(self) -> bool:
        return self.failing_link is None and self.final_matches


def check_approximation(f: SPF | Callable, s, budget: int = 10_000) -> ApproximationReport:
    """Check the chain ``f(atake(0,s)) ⊑ f(atake(1,s)) ⊑ ... ⊑ f(s)``.

    ``failing_link = k`` means the link between steps ``k`` and ``k + 1`` broke.
    """
    items = _lift(s).to_tuple()
    chain = [_lift(f(Stream(items[:k]))).prefix(budget) for k in range(len(items) + 1)]
    report = ApproximationReport(chain)
    for k in range(len(chain) - 1):
        if prefix_le(Stream(chain[k]), Stream(chain[k + 1]), budget) is not Verdict.TRUE:
            report.failing_link = k
            break
    report.final_matches = _lift(f(Stream(items))).prefix(budget) == chain[-1]
    return report

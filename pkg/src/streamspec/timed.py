"""Timed streams: ordinary streams over messages extended with a tick.

A timed stream is just a :class:`~streamspec.stream.Stream` whose elements are
either ``Msg(m)`` or the :data:`TICK` singleton, so every untimed operator
applies unchanged.  Each tick closes one time frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Generic, Iterable, TypeVar

from .errors import InsufficientFrames
from .stream import (
    BudgetLike,
    Stream,
    Verdict,
    _horizon,
    _lift,
    epsilon,
)

M = TypeVar("M")

__all__ = [
    "Msg", "Tick", "TICK", "tstream", "is_tick", "ttake", "time_abs",
    "time_complete_bounded", "frames", "split_frames", "unframe",
    "is_time_synchronous",
]


@dataclass(frozen=True)
class Msg(Generic[M]):
    value: M

    def __post_init__(self):
        if isinstance(self.value, Tick):
            raise TypeError("Msg cannot wrap a tick")

    def __repr__(self):
        return f"Msg({self.value!r})"


class Tick:
    """The tick marking the end of a time frame.  Use the :data:`TICK` singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TICK"

    def __reduce__(self):
        return (Tick, ())


TICK = Tick()


def is_tick(x: Any) -> bool:
    return x is TICK


def tstream(*items: Any) -> Stream:
    """Build a finite timed stream; anything that is not ``TICK`` is wrapped in ``Msg``."""
    return Stream(tuple(x if x is TICK or isinstance(x, Msg) else Msg(x) for x in items))


def ttake(n: int, s: Stream) -> Stream:
    """At most ``n`` time frames from the front of ``s``, closing ticks included."""
    s = _lift(s)
    if n <= 0:
        return epsilon()

    def gen():
        seen = 0
        for x in s:
            yield x
            if x is TICK:
                seen += 1
                if seen == n:
                    return

    return Stream(gen())


def time_abs(s: Stream) -> Stream:
    """Drop the ticks and unwrap the messages."""
    return Stream(x.value for x in _lift(s) if x is not TICK)


def time_complete_bounded(s: Stream, budget: BudgetLike, min_ticks: int) -> Verdict:
    """Bounded evidence that ``s`` has infinitely many time frames.

    TRUE when ``s`` is a repetition of a finite base containing a tick, or when
    ``min_ticks`` ticks show up within the budget.  FALSE when ``s`` runs out
    inside the budget.  UNKNOWN otherwise.
    """
    s = _lift(s)
    if s.declared_infinite and s.cycle is not None and TICK in s.cycle:
        return Verdict.TRUE
    k = _horizon(budget)
    ticks = 0
    for i in range(k):
        if not s._has(i):
            return Verdict.FALSE
        if s._buf[i] is TICK:
            ticks += 1
            if ticks >= min_ticks:
                return Verdict.TRUE
    if not s.declared_infinite and not s._has(k):
        return Verdict.FALSE
    return Verdict.UNKNOWN


def _scan_frames(s: Stream, n: int | None, budget: BudgetLike | None):
    limit = None if budget is None else _horizon(budget)
    out: list[tuple] = []
    current: list = []
    for i, x in enumerate(_lift(s)):
        if limit is not None and i >= limit:
            break
        if x is TICK:
            out.append(tuple(current))
            current = []
            if n is not None and len(out) == n:
                return out, tuple(current)
        else:
            current.append(x.value)
    return out, tuple(current)


def frames(s: Stream, n: int, budget: BudgetLike | None = None) -> list[Stream]:
    """Message contents of the first ``n`` time frames.

    Each frame holds the payloads strictly before its closing tick.  Raises
    :class:`InsufficientFrames` if the stream (or the optional budget) ends
    before ``n`` ticks are seen.
    """
    if n <= 0:
        return []
    found, _ = _scan_frames(s, n, budget)
    if len(found) < n:
        raise InsufficientFrames(n, len(found))
    return [Stream(f) for f in found]


def split_frames(s: Stream) -> tuple[list[Stream], Stream]:
    """Split a finite timed stream into all complete frames and the trailing payloads."""
    found, rest = _scan_frames(s, None, None)
    return [Stream(f) for f in found], Stream(rest)


def unframe(fs: Iterable[Iterable], trailing: Iterable = ()) -> Stream:
    """Inverse of :func:`split_frames`: re-insert ticks between frame contents."""
    items: list = []
    for f in fs:
        items.extend(Msg(x) for x in f)
        items.append(TICK)
    items.extend(Msg(x) for x in trailing)
    return Stream(tuple(items))


def is_time_synchronous(s: Stream, n_frames: int, budget: BudgetLike | None = None) -> bool:
    return all(len(f.to_tuple()) == 1 for f in frames(s, n_frames, budget))

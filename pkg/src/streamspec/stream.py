"""Possibly-infinite message streams and their operator algebra.

A :class:`Stream` wraps a demand-driven producer and memoizes every element
it has produced, so that repeated enumeration always yields the same
sequence.  Streams built by constructors that can never exhaust (e.g.
:func:`aipower`) carry ``declared_infinite=True``; every other stream is
treated as "finite or unknown" and queries that would need to see its end
are answered within an :class:`EvalBudget`.

Operators follow the usual naming: ``atake``/``adrop`` select and drop
prefixes, ``anth`` indexes (0-based), ``slen`` measures length in
:class:`ExtNat`, and ``prefix_le``/``bounded_eq`` are the budgeted
executable versions of the prefix order and of stream equality.
"""

from __future__ import annotations

import enum
import functools
import itertools
import operator
import threading
from dataclasses import dataclass
from typing import Any, Callable, Generic, Iterable, Iterator, TypeVar, Union

from .errors import EmptyBaseError, IndexBeyondEnd

T = TypeVar("T")
U = TypeVar("U")

__all__ = [
    "ExtNat", "Fin", "INF", "AtLeast", "EvalBudget", "Stream", "Verdict", "Equality",
    "epsilon", "concat", "atake", "adrop", "anth", "slen", "afilter", "amap",
    "aflatten", "aipower", "aremstutter", "azip", "apro", "prefix_le", "bounded_eq",
]


@functools.total_ordering
@dataclass(frozen=True)
class ExtNat:
    """A natural number or infinity.  ``value is None`` encodes infinity."""

    value: int | None

    def __post_init__(self):
        if self.value is not None and self.value < 0:
            raise ValueError("ExtNat must be non-negative")

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, 0) if self.value is None else (0, self.value)

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExtNat):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return ExtNat(other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash(("ExtNat", self.value))

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._key() < other._key()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_inf or other.is_inf:
            return INF
        return ExtNat(self.value + other.value)

    __radd__ = __add__

    def __repr__(self):
        return "INF" if self.value is None else f"Fin({self.value})"


def Fin(n: int) -> ExtNat:
    return ExtNat(n)


INF = ExtNat(None)


@dataclass(frozen=True)
class AtLeast:
    """Length verdict for an undeclared stream that outlived the budget."""

    bound: int


@dataclass(frozen=True)
class EvalBudget:
    """Evaluation horizon for semi-decidable queries on possibly-infinite streams."""

    max_elements: int

    def __post_init__(self):
        if self.max_elements < 1:
            raise ValueError("max_elements must be >= 1")


BudgetLike = Union[EvalBudget, int]


def _horizon(budget: BudgetLike) -> int:
    if isinstance(budget, EvalBudget):
        return budget.max_elements
    return EvalBudget(int(budget)).max_elements


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown-at-budget"


class Equality(enum.Enum):
    EQUAL_FINITE = "equal-finite"
    EQUAL_AT_BUDGET = "equal-at-budget"
    UNEQUAL = "unequal"


class Stream(Generic[T]):
    """An immutable, lazily produced, memoized sequence of messages.

    ``Stream([1, 2, 3])`` is a finite stream; any iterable (including a
    generator) is accepted and consumed on demand.  Pass ``infinite=True``
    only when the source provably never exhausts.
    """

    __slots__ = ("_buf", "_it", "_lock", "declared_infinite", "cycle")

    def __init__(self, source: Iterable[T] = (), *, infinite: bool = False):
        if isinstance(source, (list, tuple)) and not infinite:
            self._buf = list(source)
            self._it = None
        else:
            self._buf = []
            self._it = iter(source)
        self._lock = threading.RLock()
        self.declared_infinite = bool(infinite)
        # finite base of a repetition; lets timed queries reason about recurrence
        self.cycle: tuple | None = None

    @classmethod
    def of(cls, *items: T) -> "Stream[T]":
        return cls(items)

    def _has(self, i: int) -> bool:
        """Produce elements until index ``i`` exists or the source is exhausted."""
        if i < len(self._buf):
            return True
        if self._it is None:
            return False
        with self._lock:
            while len(self._buf) <= i:
                if self._it is None:
                    return False
                try:
                    self._buf.append(next(self._it))
                except StopIteration:
                    self._it = None
                    return False
            return True

    def __iter__(self) -> Iterator[T]:
        i = 0
        while self._has(i):
            yield self._buf[i]
            i += 1

    def __getitem__(self, i: int) -> T:
        return anth(i, self)

    def prefix(self, n: int) -> tuple:
        """The first ``min(n, #self)`` elements as a tuple."""
        self._has(n - 1)
        return tuple(self._buf[:n])

    def to_tuple(self) -> tuple:
        """Materialize the whole stream.  Never returns on an infinite stream."""
        if self.declared_infinite:
            raise ValueError("cannot materialize a declared-infinite stream")
        i = len(self._buf)
        while self._has(i):
            i += 1
        return tuple(self._buf)

    @property
    def exhausted(self) -> bool:
        """True once the producer is known to be finished."""
        return self._it is None

    def __eq__(self, other):
        # structural equality, only meaningful for finite streams
        if not isinstance(other, Stream):
            return NotImplemented
        if self.declared_infinite or other.declared_infinite:
            raise TypeError("structural equality is undefined on infinite streams; use bounded_eq")
        return self.to_tuple() == other.to_tuple()

    __hash__ = None

    def __add__(self, other):
        return concat(self, other)

    def __repr__(self):
        shown = self.prefix(10)
        body = ", ".join(repr(x) for x in shown)
        if len(shown) == 10 and self._has(10):
            body += ", ..."
        return f"<{body}>"


def _lift(s) -> Stream:
    return s if isinstance(s, Stream) else Stream(s)


def epsilon() -> Stream:
    """The empty stream."""
    return Stream(())


def concat(a: Stream[T], b: Stream[T]) -> Stream[T]:
    """All of ``a`` followed by all of ``b``; an infinite ``a`` absorbs ``b``."""
    a, b = _lift(a), _lift(b)
    if a.declared_infinite:
        return a
    if a.exhausted and b.exhausted:
        return Stream(a._buf + b._buf)
    return Stream(itertools.chain(a, b), infinite=b.declared_infinite)


def atake(n: int, s: Stream[T]) -> Stream[T]:
    s = _lift(s)
    if n <= 0:
        return epsilon()
    return Stream(itertools.islice(s, n))


def adrop(n: int, s: Stream[T]) -> Stream[T]:
    s = _lift(s)
    if n <= 0:
        return s
    return Stream(itertools.islice(s, n, None), infinite=s.declared_infinite)


def anth(n: int, s: Stream[T]) -> T:
    """The message at 0-based index ``n``; raises :class:`IndexBeyondEnd`."""
    s = _lift(s)
    if n < 0:
        raise IndexBeyondEnd(n, 0)
    if not s._has(n):
        raise IndexBeyondEnd(n, len(s._buf))
    return s._buf[n]


def slen(s: Stream, budget: BudgetLike) -> ExtNat | AtLeast:
    """Length of ``s``.

    Returns ``INF`` for declared-infinite streams and the exact length when
    ``s`` exhausts within the budget.  An undeclared stream that outlives the
    budget yields ``AtLeast(K + 1)``: infinity is never reported on guesswork.
    """
    s = _lift(s)
    if s.declared_infinite:
        return INF
    k = _horizon(budget)
    if s._has(k):
        return AtLeast(k + 1)
    return Fin(len(s._buf))


def afilter(keep: Callable[[T], bool], s: Stream[T]) -> Stream[T]:
    return Stream(x for x in _lift(s) if keep(x))


def amap(f: Callable[[T], U], s: Stream[T]) -> Stream[U]:
    s = _lift(s)
    return Stream(map(f, s), infinite=s.declared_infinite)


def aflatten(ss: Stream[Stream[T]]) -> Stream[T]:
    """Concatenate the inner streams in order."""
    def gen():
        for inner in _lift(ss):
            yield from _lift(inner)
    return Stream(gen())


def aipower(s: Stream[T]) -> Stream[T]:
    """Repeat ``s`` without end.  The empty base is rejected."""
    s = _lift(s)
    if not s._has(0):
        raise EmptyBaseError("aipower of the empty stream is undefined")

    def gen():
        while True:
            yield from s

    out = Stream(gen(), infinite=True)
    if s.exhausted:
        out.cycle = tuple(s._buf)
    return out


def aremstutter(s: Stream[T]) -> Stream[T]:
    """Collapse every maximal run of equal adjacent messages to one.

    On a repetition with a known cycle the answer is exact: a constant cycle
    collapses to one message, any other cycle stays infinite.  On other
    lazy streams, reading past the last change of value does not terminate.
    """
    s = _lift(s)
    if s.cycle is not None and all(x == s.cycle[0] for x in s.cycle):
        return Stream((s.cycle[0],))

    def gen():
        marker = object()
        last: Any = marker
        for x in s:
            if last is marker or x != last:
                yield x
            last = x
    return Stream(gen(), infinite=s.cycle is not None)


def azip(a: Stream[T], b: Stream[U]) -> Stream[tuple[T, U]]:
    a, b = _lift(a), _lift(b)
    return Stream(zip(a, b), infinite=a.declared_infinite and b.declared_infinite)


def apro(k: int, s: Stream[tuple]) -> Stream:
    """Pointwise projection onto component ``k`` (1 or 2) of a pair stream."""
    if k not in (1, 2):
        raise ValueError("projection index must be 1 or 2")
    return amap(operator.itemgetter(k - 1), s)


def prefix_le(a: Stream[T], b: Stream[T], budget: BudgetLike) -> Verdict:
    """Decide ``a`` being an element-wise prefix of ``b`` up to the budget."""
    a, b = _lift(a), _lift(b)
    k = _horizon(budget)
    for i in range(k):
        if not a._has(i):
            return Verdict.TRUE
        if not b._has(i) or a._buf[i] != b._buf[i]:
            return Verdict.FALSE
    if not a._has(k):
        return Verdict.TRUE
    return Verdict.UNKNOWN


def bounded_eq(a: Stream[T], b: Stream[T], budget: BudgetLike) -> Equality:
    """Compare the first ``budget`` positions of two streams (take-lemma shadow)."""
    a, b = _lift(a), _lift(b)
    k = _horizon(budget)
    for i in range(k + 1):
        ha, hb = a._has(i), b._has(i)
        if ha != hb:
            return Equality.UNEQUAL
        if not ha:
            return Equality.EQUAL_FINITE
        if i < k and a._buf[i] != b._buf[i]:
            return Equality.UNEQUAL
    return Equality.EQUAL_AT_BUDGET

"""Alternating Bit Protocol over oracle-driven lossy media.

Channel names follow the usual architecture picture: ``i`` (input data),
``ds`` (sender to data medium), ``dr`` (data medium to receiver), ``ar``
(receiver to ack medium), ``as_`` (ack medium to sender) and ``o``
(delivered data).

The media are deterministic once their Boolean oracle stream is fixed: the
k-th message offered to a medium is passed on iff the k-th oracle bit is
true.  :func:`simulate_abp` runs sender, media and receiver in lock-step
rounds and records what crossed every channel; the ``*_check`` functions
test recorded traces against the relational requirements on each component.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, NamedTuple

from .errors import MalformedTrace
from .spf import Component, Network
from .stream import (
    BudgetLike,
    Stream,
    Verdict,
    _horizon,
    _lift,
    apro,
    aremstutter,
    atake,
    azip,
    prefix_le,
    slen,
)

__all__ = [
    "DataPacket", "OracleStream", "medium_apply", "MediumVerdict", "medium_relation_check",
    "FairnessReport", "fairness_check", "Sender", "Receiver", "make_sender", "make_receiver",
    "RoundRecord", "AbpTrace", "simulate_abp", "CheckReport", "sender_spec_check",
    "receiver_spec_check", "overall_check", "check_all", "abp_network",
    "sender_function", "receiver_function",
]


class DataPacket(NamedTuple):
    payload: Any
    bit: bool


class OracleStream(Stream):
    """An infinite Boolean stream that decides which messages a medium passes.

    ``source`` describes how the stream was built, so it can be recorded in
    a trace header and rebuilt with :meth:`from_source`.
    """

    __slots__ = ("source",)

    def __init__(self, bits: Iterable[bool], source: dict):
        super().__init__(bits, infinite=True)
        self.source = source

    @classmethod
    def seeded(cls, seed: int, theta: float) -> "OracleStream":
        """Pseudorandom oracle: each bit is true with probability ``theta``."""
        _check_density(theta)
        rng = random.Random(seed)

        def gen():
            while True:
                yield rng.random() < theta

        return cls(gen(), {"kind": "seeded", "seed": seed, "theta": theta})

    @classmethod
    def cyclic(cls, prefix: Iterable[bool] = (), cycle: Iterable[bool] = (True,)) -> "OracleStream":
        """``prefix`` followed by ``cycle`` repeated forever."""
        prefix, cycle = tuple(map(bool, prefix)), tuple(map(bool, cycle))
        if not cycle:
            raise ValueError("oracle cycle must be non-empty")

        def gen():
            yield from prefix
            while True:
                yield from cycle

        return cls(gen(), {"kind": "cyclic", "prefix": list(prefix), "cycle": list(cycle)})

    @classmethod
    def periodic(cls, theta: float) -> "OracleStream":
        """Deterministic oracle with long-run true density ``theta``.

        A true bit appears at least once in every ``ceil(1 / theta)``
        consecutive positions.
        """
        _check_density(theta)

        def gen():
            acc = 0.0
            while True:
                acc += theta
                if acc >= 1.0 - 1e-12:
                    acc -= 1.0
                    yield True
                else:
                    yield False

        return cls(gen(), {"kind": "periodic", "theta": theta})

    @classmethod
    def constant(cls, value: bool = True) -> "OracleStream":
        return cls.cyclic((), (value,))

    @classmethod
    def from_source(cls, source: dict) -> "OracleStream":
        kind = source.get("kind")
        if kind == "seeded":
            return cls.seeded(source["seed"], source["theta"])
        if kind == "cyclic":
            return cls.cyclic(source.get("prefix", ()), source["cycle"])
        if kind == "periodic":
            return cls.periodic(source["theta"])
        raise ValueError(f"unknown oracle kind {kind!r}")

    @staticmethod
    def fairness_window(theta: float) -> int:
        return math.ceil(10 / theta)


def _check_density(theta: float) -> None:
    if not (0 < theta <= 1):
        raise ValueError(f"oracle density must lie in (0, 1], got {theta}")


def medium_apply(inp: Iterable, p: Iterable[bool]) -> Stream:
    """Pass the k-th input message iff the k-th oracle bit is true."""
    inp, p = _lift(inp), _lift(p)
    return Stream(x for x, keep in zip(inp, p) if keep)


@dataclass
class MediumVerdict:
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


def medium_relation_check(inp: Iterable, out: Iterable) -> MediumVerdict:
    """Is ``out`` a possible observation of a lossy medium fed with ``inp``?

    For finite streams that is exactly "``out`` is a subsequence of ``inp``";
    the greedy match gives the witnessing oracle prefix.
    """
    xs, ys = _lift(inp).to_tuple(), _lift(out).to_tuple()
    witness = []
    j = 0
    for x in xs:
        take = j < len(ys) and x == ys[j]
        witness.append(take)
        j += take
    if j < len(ys):
        return MediumVerdict(False)
    return MediumVerdict(True, tuple(witness))


@dataclass
class FairnessReport:
    horizon: int
    output_length: int
    true_count: int
    projection_lengths: tuple

    @property
    def passed(self) -> bool:
        a, b, c = self.projection_lengths
        return self.output_length == self.true_count and a == b == c


def fairness_check(p: Stream, inp: Stream, budget: BudgetLike) -> FairnessReport:
    k = _horizon(budget)
    window = atake(k, inp).to_tuple()
    out_len = len(medium_apply(window, p).to_tuple())
    trues = sum(1 for bit in _lift(p).prefix(len(window)) if bit)
    z = azip(inp, p)
    lengths = (slen(apro(1, z), k), slen(apro(2, z), k), slen(z, k))
    return FairnessReport(k, out_len, trues, lengths)


class Sender:
    """Sender state machine driven one round at a time.

    The head of the queue is (re)emitted every round, tagged with the current
    bit, until an acknowledgment carrying that bit comes back.  Then the bit
    flips and the next datum becomes the head.
    """

    def __init__(self, initial_bit: bool):
        self.bit = bool(initial_bit)
        self.queue: deque = deque()
        self.awaiting = False

    def offer(self, data: Iterable) -> None:
        self.queue.extend(data)

    @property
    def done(self) -> bool:
        return not self.queue

    def emit(self) -> DataPacket | None:
        if not self.queue:
            return None
        self.awaiting = True
        return DataPacket(self.queue[0], self.bit)

    def receive_ack(self, bit: bool) -> bool:
        """Consume an acknowledgment; returns True if it completed the current datum."""
        if self.awaiting and bit == self.bit:
            self.queue.popleft()
            self.bit = not self.bit
            self.awaiting = False
            return True
        return False


class Receiver:
    """Acknowledges every packet; delivers a payload only when the bit changes."""

    def __init__(self):
        self.last: bool | None = None

    def receive(self, pkt: DataPacket) -> tuple[bool, tuple]:
        payload, bit = pkt
        fresh = self.last is None or bit != self.last
        self.last = bit
        return bit, ((payload,) if fresh else ())


def make_sender(initial_bit: bool) -> Sender:
    return Sender(initial_bit)


def make_receiver() -> Receiver:
    return Receiver()


class RoundRecord(NamedTuple):
    """What crossed each channel in one round; ``None`` means nothing did."""

    ds: DataPacket | None = None
    dr: DataPacket | None = None
    ar: bool | None = None
    as_: bool | None = None
    o: tuple = ()


@dataclass
class AbpTrace:
    i: tuple
    log: list[RoundRecord] = field(default_factory=list)
    completed: bool = False
    seeds: dict = field(default_factory=dict)

    @property
    def rounds(self) -> int:
        return len(self.log)

    def _channel(self, name: str) -> Stream:
        return Stream(tuple(getattr(r, name) for r in self.log if getattr(r, name) is not None))

    @property
    def ds(self) -> Stream:
        return self._channel("ds")

    @property
    def dr(self) -> Stream:
        return self._channel("dr")

    @property
    def ar(self) -> Stream:
        return self._channel("ar")

    @property
    def as_(self) -> Stream:
        return self._channel("as_")

    @property
    def o(self) -> Stream:
        return Stream(tuple(x for r in self.log for x in r.o))


def simulate_abp(
    inp: Iterable,
    sender_initial_bit: bool,
    data_oracle: Stream,
    ack_oracle: Stream,
    max_rounds: int,
) -> AbpTrace:
    """Run the protocol in rounds until everything is acknowledged or ``max_rounds``.

    One round: the sender emits its current packet, the data medium consults
    its next oracle bit, a delivered packet makes the receiver emit an ack,
    the ack medium consults its next oracle bit, and a surviving ack reaches
    the sender.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    data = _lift(inp).to_tuple()
    sender = make_sender(sender_initial_bit)
    sender.offer(data)
    receiver = make_receiver()
    dbits, abits = iter(data_oracle), iter(ack_oracle)
    log: list[RoundRecord] = []
    while not sender.done and len(log) < max_rounds:
        pkt = sender.emit()
        got = pkt if next(dbits) else None
        ack = back = None
        delivered: tuple = ()
        if got is not None:
            ack, delivered = receiver.receive(got)
            back = ack if next(abits) else None
            if back is not None:
                sender.receive_ack(back)
        log.append(RoundRecord(pkt, got, ack, back, delivered))
    seeds = {
        "data": getattr(data_oracle, "source", None),
        "ack": getattr(ack_oracle, "source", None),
    }
    return AbpTrace(data, log, sender.done, seeds)


@dataclass
class CheckReport:
    verdicts: dict[str, bool]
    details: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.verdicts.items() if not v]


def _check_types(trace: AbpTrace) -> None:
    for n, r in enumerate(trace.log, 1):
        for name in ("ds", "dr"):
            v = getattr(r, name)
            if v is not None and not (isinstance(v, tuple) and len(v) == 2 and isinstance(v[1], bool)):
                raise MalformedTrace(f"round {n}: {name} carries {v!r}, expected a (payload, bit) packet")
        for name in ("ar", "as_"):
            v = getattr(r, name)
            if v is not None and not isinstance(v, bool):
                raise MalformedTrace(f"round {n}: {name} carries {v!r}, expected a bit")
        if not isinstance(r.o, tuple):
            raise MalformedTrace(f"round {n}: o must be a tuple of delivered payloads")


def _is_prefix(a: Stream, b: Stream) -> bool:
    return prefix_le(a, b, len(a.to_tuple()) + 1) is Verdict.TRUE


def _ack_walk(trace: AbpTrace):
    """Fresh packets in emission order, with first-emission round and ack round."""
    fresh: list[dict] = []
    current = None
    for n, r in enumerate(trace.log):
        if r.ds is not None and r.ds != current:
            current = r.ds
            fresh.append({"pkt": current, "first": n, "acked": None})
        if r.as_ is not None and fresh and fresh[-1]["acked"] is None and r.as_ == fresh[-1]["pkt"].bit:
            fresh[-1]["acked"] = n
    return fresh


def sender_spec_check(trace: AbpTrace) -> CheckReport:
    """The five sender requirements, adapted to a finite trace horizon."""
    _check_types(trace)
    i = Stream(trace.i)
    ds = trace.ds
    verdicts, details = {}, {}

    fresh_pkts = aremstutter(ds)
    verdicts["sender.1"] = _is_prefix(apro(1, fresh_pkts), i)

    bits = aremstutter(apro(2, ds)).to_tuple()
    b0 = bits[0] if bits else None
    verdicts["sender.2"] = all(b == (b0 if k % 2 == 0 else not b0) for k, b in enumerate(bits))
    details["sender.2"] = f"initial bit {b0}"

    pk = fresh_pkts.to_tuple()
    clash = next((k for k in range(1, len(pk)) if pk[k].bit == pk[k - 1].bit), None)
    verdicts["sender.3"] = clash is None
    if clash is not None:
        details["sender.3"] = f"fresh packets {clash - 1} and {clash} share bit {pk[clash].bit}"

    walk = _ack_walk(trace)
    last_round = len(trace.log) - 1
    ok4 = True
    for k, f in enumerate(walk):
        n = f["acked"]
        if n is None or k + 1 >= len(trace.i) or n == last_round:
            continue
        want = DataPacket(trace.i[k + 1], not f["pkt"].bit)
        if not any(r.ds == want for r in trace.log[n + 1:]):
            ok4 = False
            details["sender.4"] = f"ack in round {n + 1} not followed by {want}"
            break
    verdicts["sender.4"] = ok4

    ok5 = True
    for f in walk:
        if f["acked"] is not None:
            continue
        if any(r.ds != f["pkt"] for r in trace.log[f["first"]:]):
            ok5 = False
            details["sender.5"] = f"unacknowledged {f['pkt']} not retransmitted through the last round"
            break
    verdicts["sender.5"] = ok5
    return CheckReport(verdicts, details)


def _remstutter_by_bit(s: Stream) -> Stream:
    def gen():
        last = None
        for pkt in s:
            if last is None or pkt.bit != last:
                yield pkt
            last = pkt.bit
    return Stream(gen())


def receiver_spec_check(trace: AbpTrace) -> CheckReport:
    _check_types(trace)
    dr = Stream(tuple(DataPacket(*p) for p in trace.dr))
    verdicts = {
        "receiver.1": trace.ar == apro(2, dr),
        "receiver.2": trace.o == apro(1, _remstutter_by_bit(dr)),
    }
    return CheckReport(verdicts)


def overall_check(trace: AbpTrace) -> CheckReport:
    """Delivered data is a prefix of the input, and all of it once the run completed."""
    i, o = Stream(trace.i), trace.o
    verdicts = {"overall": _is_prefix(o, i) and (not trace.completed or o == i)}
    return CheckReport(verdicts)


def check_all(trace: AbpTrace) -> CheckReport:
    """Every trace-level check: sender (5), receiver (2), both media, overall."""
    out = CheckReport({})
    for rep in (sender_spec_check(trace), receiver_spec_check(trace)):
        out.verdicts.update(rep.verdicts)
        out.details.update(rep.details)
    out.verdicts["medium.data"] = bool(medium_relation_check(trace.ds, trace.dr))
    out.verdicts["medium.ack"] = bool(medium_relation_check(trace.ar, trace.as_))
    out.verdicts.update(overall_check(trace).verdicts)
    return out


def sender_function(initial_bit: bool):
    def sender(i: Stream, acks: Stream) -> Stream:
        def gen():
            bit, k = bool(initial_bit), 0
            if not i._has(0):
                return
            yield DataPacket(i._buf[0], bit)
            for a in acks:
                if a == bit:
                    k, bit = k + 1, not bit
                    if not i._has(k):
                        return
                # a wrong-bit ack triggers a retransmission
                yield DataPacket(i._buf[k], bit)
        return Stream(gen())
    return sender


def receiver_function(dr: Stream):
    return apro(2, dr), apro(1, _remstutter_by_bit(dr))


def abp_network(data_oracle: Stream, ack_oracle: Stream, initial_bit: bool = False) -> Network:
    """The protocol as a network of stream functions for :func:`fixpoint_solve`.

    The sender here is the untimed functional form: it reacts to each
    acknowledgment, so a packet lost before any ack comes back is never
    retransmitted.  Loss-tolerant runs go through :func:`simulate_abp`.
    """
    return Network(
        components=(
            Component("sender", sender_function(initial_bit), ("i", "as_"), ("ds",)),
            Component("data_medium", lambda s: medium_apply(s, data_oracle), ("ds",), ("dr",)),
            Component("receiver", receiver_function, ("dr",), ("ar", "o")),
            Component("ack_medium", lambda s: medium_apply(s, ack_oracle), ("ar",), ("as_",)),
        ),
        inputs=("i",),
        outputs=("o",),
    )

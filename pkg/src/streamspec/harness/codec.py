"""JSON encoding for messages, finite streams, automata and networks."""

from __future__ import annotations

from typing import Any

from ..abp import (
    DataPacket,
    OracleStream,
    abp_network,
    medium_apply,
    receiver_function,
    sender_function,
)
from ..automata import Bid, Ioa, ioafp
from ..spf import Component, Network
from ..stream import Stream, _lift
from ..timed import TICK, Msg


def encode_value(v: Any) -> Any:
    """Map a message to JSON.  Ticks, timed messages and bids get a one-key tag."""
    if v is TICK:
        return {"tick": True}
    if isinstance(v, Msg):
        return {"msg": encode_value(v.value)}
    if isinstance(v, Bid):
        return {"bid": encode_value(v.bidder)}
    if isinstance(v, (tuple, list)):
        return [encode_value(x) for x in v]
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    raise TypeError(f"cannot encode {v!r}")


def decode_value(v: Any) -> Any:
    """Inverse of :func:`encode_value`; JSON arrays come back as tuples."""
    if isinstance(v, dict):
        if v.keys() == {"tick"}:
            return TICK
        if v.keys() == {"msg"}:
            return Msg(decode_value(v["msg"]))
        if v.keys() == {"bid"}:
            return Bid(decode_value(v["bid"]))
        raise ValueError(f"unknown tagged value {v!r}")
    if isinstance(v, list):
        return tuple(decode_value(x) for x in v)
    return v


def encode_stream(s) -> list:
    """A finite stream as a flat JSON array."""
    return [encode_value(x) for x in _lift(s).to_tuple()]


def decode_stream(items: list) -> Stream:
    return Stream(tuple(decode_value(x) for x in items))


def ioa_to_dict(a: Ioa) -> dict:
    key = lambda x: repr(x)  # noqa: E731 - stable ordering for byte-stable output
    return {
        "states": [encode_value(s) for s in sorted(a.states, key=key)],
        "inputs": [encode_value(x) for x in sorted(a.inputs, key=key)],
        "outputs": [encode_value(x) for x in sorted(a.outputs, key=key)],
        "delta": [[encode_value(t.src), encode_value(t.inp), encode_value(t.dst), encode_value(t.out)]
                  for t in a.delta],
        "init": [[encode_value(s), encode_value(o)] for s, o in a.init],
    }


def ioa_from_dict(d: dict) -> Ioa:
    dv = decode_value
    return Ioa.build(
        (dv(s) for s in d["states"]),
        (dv(x) for x in d["inputs"]),
        (dv(x) for x in d["outputs"]),
        ((dv(s), dv(x), dv(t), dv(o)) for s, x, t, o in d["delta"]),
        ((dv(s), dv(o)) for s, o in d["init"]),
    )


def _component(entry: dict) -> Component:
    kind = entry["kind"]
    name = entry["name"]
    ins, outs = tuple(entry["in"]), tuple(entry["out"])
    if kind == "identity":
        return Component(name, lambda s: s, ins, outs)
    if kind == "medium":
        oracle = OracleStream.from_source(entry["oracle"])
        return Component(name, lambda s: medium_apply(s, oracle), ins, outs)
    if kind == "abp-sender":
        return Component(name, sender_function(entry.get("initial_bit", False)), ins, outs)
    if kind == "abp-receiver":
        return Component(name, receiver_function, ins, outs)
    if kind == "ioa":
        return Component(name, ioafp(ioa_from_dict(entry["automaton"])), ins, outs)
    raise ValueError(f"unknown component kind {kind!r}")


def network_from_config(cfg: dict) -> Network:
    """Build a network from its configuration record.

    ``{"abp": {"data_oracle": ..., "ack_oracle": ..., "initial_bit": ...}}``
    is shorthand for the protocol network; otherwise ``components`` lists
    records with ``name``, ``kind``, ``in`` and ``out`` plus kind-specific
    keys (``oracle`` for media, ``automaton`` for ``ioa``).
    """
    if "abp" in cfg:
        a = cfg["abp"]
        return abp_network(
            OracleStream.from_source(a["data_oracle"]),
            OracleStream.from_source(a["ack_oracle"]),
            a.get("initial_bit", False),
        )
    return Network(
        tuple(_component(c) for c in cfg["components"]),
        tuple(cfg.get("inputs", ())),
        tuple(cfg.get("outputs", ())),
    )


def packet_to_json(p: DataPacket | None):
    return None if p is None else [encode_value(p.payload), p.bit]

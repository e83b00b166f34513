"""Run configurations and the line-delimited JSON trace file.

A trace file holds one JSON object per line::

    {"record": "header", "format": "abp-trace", "version": 1, "config": {...}, "oracles": {...}}
    {"record": "round", "n": 1, "ds": [payload, bit], "dr": null, "ar": null, "as": null, "o": []}
    ...
    {"record": "footer", "completed": true, "rounds": 3, "delivered": 3, "drops": {"data": 0, "ack": 0}}

Keys are sorted and separators are compact, so a config always renders to
the same bytes.
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import IO, Any

from ..abp import AbpTrace, DataPacket, OracleStream, RoundRecord, simulate_abp
from ..errors import InvalidConfig, TraceParseError
from .codec import decode_value, encode_value, packet_to_json

FORMAT = "abp-trace"
VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    inputs: tuple = ()
    seed_data: int = 0
    seed_ack: int = 1
    theta_data: float = 1.0
    theta_ack: float = 1.0
    initial_bit: bool = False
    max_rounds: int = 10_000
    output_path: str | None = None

    def validate(self) -> "RunConfig":
        for name in ("theta_data", "theta_ack"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0 < v <= 1):
                raise InvalidConfig(f"{name} must lie in (0, 1], got {v!r}")
        if not isinstance(self.max_rounds, int) or self.max_rounds < 1:
            raise InvalidConfig(f"max_rounds must be >= 1, got {self.max_rounds!r}")
        for name in ("seed_data", "seed_ack"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise InvalidConfig(f"{name} must be a natural number, got {v!r}")
        if not isinstance(self.initial_bit, bool):
            raise InvalidConfig("initial_bit must be a boolean")
        try:
            encode_value(tuple(self.inputs))
        except TypeError as e:
            raise InvalidConfig(str(e)) from None
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("output_path")
        d["inputs"] = encode_value(tuple(self.inputs))
        return d

    @classmethod
    def from_dict(cls, d: dict, output_path: str | None = None) -> "RunConfig":
        known = {k: d[k] for k in ("seed_data", "seed_ack", "theta_data", "theta_ack",
                                   "initial_bit", "max_rounds") if k in d}
        return cls(inputs=decode_value(d.get("inputs", [])), output_path=output_path, **known)

    def oracles(self) -> tuple[OracleStream, OracleStream]:
        return (OracleStream.seeded(self.seed_data, self.theta_data),
                OracleStream.seeded(self.seed_ack, self.theta_ack))


def run_config(config: RunConfig) -> AbpTrace:
    config.validate()
    data_oracle, ack_oracle = config.oracles()
    return simulate_abp(config.inputs, config.initial_bit, data_oracle, ack_oracle, config.max_rounds)


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def summary(trace: AbpTrace) -> dict:
    return {
        "completed": trace.completed,
        "rounds": trace.rounds,
        "delivered": len(trace.o.to_tuple()),
        "drops": {
            "data": len(trace.ds.to_tuple()) - len(trace.dr.to_tuple()),
            "ack": len(trace.ar.to_tuple()) - len(trace.as_.to_tuple()),
        },
    }


def write_trace(trace: AbpTrace, config: RunConfig, fp: IO[str]) -> None:
    fp.write(_dump({
        "record": "header", "format": FORMAT, "version": VERSION,
        "config": config.to_dict(), "oracles": trace.seeds,
    }) + "\n")
    for n, r in enumerate(trace.log, 1):
        fp.write(_dump({
            "record": "round", "n": n,
            "ds": packet_to_json(r.ds), "dr": packet_to_json(r.dr),
            "ar": r.ar, "as": r.as_, "o": [encode_value(x) for x in r.o],
        }) + "\n")
    fp.write(_dump({"record": "footer", **summary(trace)}) + "\n")


def render_trace(trace: AbpTrace, config: RunConfig) -> str:
    buf = io.StringIO()
    write_trace(trace, config, buf)
    return buf.getvalue()


def _packet(v, lineno: int, name: str):
    if v is None:
        return None
    if not (isinstance(v, list) and len(v) == 2 and isinstance(v[1], bool)):
        raise TraceParseError(lineno, f"{name} must be null or [payload, bit]")
    return DataPacket(decode_value(v[0]), v[1])


def _bit(v, lineno: int, name: str):
    if v is not None and not isinstance(v, bool):
        raise TraceParseError(lineno, f"{name} must be null or a boolean")
    return v


def parse_trace(lines) -> tuple[RunConfig, AbpTrace, dict]:
    """Parse trace lines; returns ``(config, trace, footer)``.

    Raises :class:`TraceParseError` naming the offending line.
    """
    header = footer = None
    log: list[RoundRecord] = []
    lineno = 0
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if footer is not None:
            raise TraceParseError(lineno, "content after footer")
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise TraceParseError(lineno, f"invalid JSON ({e.msg})") from None
        if not isinstance(rec, dict) or "record" not in rec:
            raise TraceParseError(lineno, "not a trace record")
        kind = rec["record"]
        if header is None:
            if kind != "header":
                raise TraceParseError(lineno, "first record must be the header")
            if rec.get("format") != FORMAT or rec.get("version") != VERSION:
                raise TraceParseError(lineno, f"unsupported format {rec.get('format')!r} v{rec.get('version')!r}")
            if not isinstance(rec.get("config"), dict):
                raise TraceParseError(lineno, "header lacks config")
            header = rec
        elif kind == "round":
            if rec.get("n") != len(log) + 1:
                raise TraceParseError(lineno, f"expected round {len(log) + 1}, got {rec.get('n')!r}")
            o = rec.get("o")
            if not isinstance(o, list):
                raise TraceParseError(lineno, "o must be a list")
            log.append(RoundRecord(
                _packet(rec.get("ds"), lineno, "ds"), _packet(rec.get("dr"), lineno, "dr"),
                _bit(rec.get("ar"), lineno, "ar"), _bit(rec.get("as"), lineno, "as"),
                tuple(decode_value(x) for x in o),
            ))
        elif kind == "footer":
            if rec.get("rounds") != len(log):
                raise TraceParseError(lineno, f"footer claims {rec.get('rounds')!r} rounds, found {len(log)}")
            if not isinstance(rec.get("completed"), bool):
                raise TraceParseError(lineno, "footer lacks completion status")
            footer = rec
        else:
            raise TraceParseError(lineno, f"unknown record type {kind!r}")
    if header is None:
        raise TraceParseError(lineno + 1, "missing header")
    if footer is None:
        raise TraceParseError(lineno + 1, "missing footer (truncated file?)")
    try:
        config = RunConfig.from_dict(header["config"])
    except (TypeError, ValueError) as e:
        raise TraceParseError(1, f"bad config: {e}") from None
    trace = AbpTrace(tuple(config.inputs), log, footer["completed"], header.get("oracles", {}))
    return config, trace, footer


def read_trace(path: str | Path) -> tuple[RunConfig, AbpTrace, dict]:
    with open(path, encoding="utf-8", newline="") as fp:
        return parse_trace(fp)

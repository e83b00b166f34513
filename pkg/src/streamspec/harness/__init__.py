"""Trace files, configuration formats and the command-line front end."""

from .codec import (
    decode_stream,
    decode_value,
    encode_stream,
    encode_value,
    ioa_from_dict,
    ioa_to_dict,
    network_from_config,
)
from .trace import RunConfig, parse_trace, read_trace, render_trace, run_config, write_trace

__all__ = [
    "RunConfig", "run_config", "write_trace", "render_trace", "parse_trace", "read_trace",
    "encode_value", "decode_value", "encode_stream", "decode_stream",
    "ioa_to_dict", "ioa_from_dict", "network_from_config",
]

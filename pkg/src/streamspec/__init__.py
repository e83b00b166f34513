"""Executable stream-processing semantics for asynchronous message-passing components.

Possibly-infinite streams and their operators, timed streams, stream-processing
functions with fixpoint composition, I/O*-automata, and an alternating bit
protocol simulator with trace checkers.
"""

from .stream import (
    INF,
    AtLeast,
    EvalBudget,
    Equality,
    ExtNat,
    Fin,
    Stream,
    Verdict,
    adrop,
    aflatten,
    afilter,
    aipower,
    amap,
    anth,
    apro,
    aremstutter,
    atake,
    azip,
    bounded_eq,
    concat,
    epsilon,
    prefix_le,
    slen,
)
from .timed import TICK, Msg, frames, is_time_synchronous, time_abs, time_complete_bounded, tstream, ttake
from .spf import (
    SPF,
    Component,
    Network,
    check_approximation,
    check_monotone,
    compose_serial,
    fixpoint_solve,
    lift_elementwise,
)
from .automata import Ioa, bisimilar, build_auction, ioafp, run, step, validate
from .abp import (
    OracleStream,
    fairness_check,
    medium_apply,
    medium_relation_check,
    overall_check,
    receiver_spec_check,
    sender_spec_check,
    simulate_abp,
)

__version__ = "0.1.0"

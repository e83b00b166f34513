"""Exception types raised across the package."""


class StreamError(Exception):
    """Base class for errors raised by stream operations."""


class IndexBeyondEnd(StreamError, IndexError):
    """A stream exhausted before the requested index."""

    def __init__(self, index: int, length: int):
        super().__init__(f"index {index} beyond end of stream of length {length}")
        self.index = index
        self.length = length


class EmptyBaseError(StreamError, ValueError):
    """Infinite repetition of the empty stream was requested."""


class InsufficientFrames(StreamError, ValueError):
    """Fewer complete time frames than requested were found."""

    def __init__(self, wanted: int, found: int):
        super().__init__(f"wanted {wanted} time frames, found {found}")
        self.wanted = wanted
        self.found = found


class WiringError(ValueError):
    """A network is not well wired (unconnected port, double driver, type clash)."""


class NonTerminatingComponent(RuntimeError):
    """A network component produced more output than the solver allows per channel."""


class AutomatonError(ValueError):
    """An automaton is unsuitable for the requested operation."""


class StuckError(AutomatonError):
    """No transition is enabled for the current (state, input) pair."""

    def __init__(self, state, message, partial=None):
        super().__init__(f"no transition from state {state!r} on input {message!r}")
        self.state = state
        self.message = message
        self.partial = partial


class AlphabetMismatch(AutomatonError):
    """Two automata compared for bisimilarity have different input alphabets."""


class MalformedTrace(ValueError):
    """A protocol trace carries values of the wrong type on some channel."""


class InvalidConfig(ValueError):
    """A run configuration violates its invariants."""


class TraceParseError(ValueError):
    """A trace file could not be parsed."""

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason

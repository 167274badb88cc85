"""Exception hierarchy."""


class HeisenframeError(Exception):
    """Base class for all package errors."""


class FockSpaceError(HeisenframeError, ValueError):
    """Invalid mode registry, occupation, or dimension."""


class SpaceMismatchError(HeisenframeError, ValueError):
    """Operands live on different Fock spaces."""


class GateError(HeisenframeError, ValueError):
    """A gate is malformed or does not fit the space it is applied to."""


class SuperselectionError(HeisenframeError, ValueError):
    """Requested object violates the parity superselection rule."""


class SynthesisError(HeisenframeError, RuntimeError):
    """A synthesized unitary does not reproduce its coefficient map."""


class ConsistencyError(HeisenframeError, RuntimeError):
    """Two independent evaluation routes disagree."""


class ScenarioError(HeisenframeError, ValueError):
    """A scenario document failed to parse or validate."""

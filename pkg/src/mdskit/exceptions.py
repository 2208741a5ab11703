"""Exception classes shared across the toolkit.

The CLI maps these onto exit codes: parse/parameter problems exit 2,
invariant violations exit 3, tripped resource guards exit 4.
"""


class ParseError(ValueError):
    """Malformed input text (edge lists, CSV matrices, SAT files)."""


class InvariantViolation(ValueError):
    """A structural invariant failed: disconnected input, asymmetric
    matrix, dimension mismatch, corrupted gadget, or a provably
    impossible numeric result."""


class ResourceGuardError(RuntimeError):
    """A size/retry guard tripped before starting infeasible work."""

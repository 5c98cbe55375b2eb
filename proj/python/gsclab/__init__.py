"""Generalized Sierpinski carpet laboratory."""

from ._core import (  # noqa: F401
    ContractViolation,
    InputError,
    Pattern,
    ResolutionError,
    SizeLimitError,
    SolverError,
    __version__,
    cell_count,
    dims,
    exit_series,
    face_count,
    prescribe_averages,
    raw_resistance,
    resistance_series,
    run,
    validate,
)

"""Numerical tolerances shared by every module."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    expectation: float = 1e-9   # expectation values, dual-path agreement
    operator: float = 1e-10     # operator identities, admissibility verdicts
    exact: float = 1e-12        # identities that hold exactly in floating point
    synthesis: float = 1e-9     # gate synthesis residual


DEFAULT = Tolerances()

# Largest Fock dimension build_space accepts unless told otherwise.
MAX_DIM = 4096

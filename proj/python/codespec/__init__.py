"""Code-spectrum toolkit: exact spectra of linear codes over prime fields,
goodness certification, linear-code JSCC encoders, and multiple-access
channel simulation.

Probabilities are exact: every mass crossing this boundary arrives as a
`fractions.Fraction`.
"""

from ._core import (
    BudgetError,
    ParseError,
    alpha_table,
    ambient_spectrum,
    build_quantizer,
    encode,
    goodness,
    gv_check,
    min_entropy_profile,
    simulate,
    spectrum,
    verify,
)

__all__ = [
    "BudgetError",
    "ParseError",
    "alpha_table",
    "ambient_spectrum",
    "build_quantizer",
    "encode",
    "goodness",
    "gv_check",
    "min_entropy_profile",
    "simulate",
    "spectrum",
    "verify",
]

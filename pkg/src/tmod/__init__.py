"""Anderson t-modules over local function fields ``F_q(t)_v``.

Formal logarithm and exponential, filled-Julia escape data and a certified
enumeration of the v-rational torsion of Drinfeld modules.
"""
from .anderson import AndersonModule, NormalizedModule, normalize, phi_of, validate_module
from .errors import (
    DimensionUnsupported, EigenvalueConditionFailed, FieldMismatch, LeadingCoefficientZero,
    NonConvergent,
    NonInvertibleConstantTerm, NotAbelian, NotNormalized, ParseError, PrecisionExhausted,
    PresentationBoundFailure, TailBoundFailure, TmodError, ValidationError,
)
from .fields import FqField, LaurentSeries, LocalField, Place
from .formal import formal_data, formal_exp, formal_log, small_torsion_excluded
from .gf import FiniteField, Poly, RatFunc
from .julia import classify_orbit, escape_constant
from .modfile import format_module, load_corpus, parse_module_file, parse_module_text
from .skew import SkewPoly, TwistedSeries, sp_eval, tps_eval, tps_invert
from .torsion import AdditivePoly, additive_roots, is_torsion, torsion_module

__version__ = "0.1.0"

__all__ = [
    "additive_roots", "AdditivePoly", "AndersonModule", "classify_orbit", "DimensionUnsupported",
    "EigenvalueConditionFailed", "escape_constant", "FieldMismatch", "FiniteField",
    "formal_data", "formal_exp", "formal_log", "format_module", "FqField", "is_torsion",
    "LaurentSeries", "LeadingCoefficientZero", "load_corpus", "LocalField", "NonConvergent",
    "NonInvertibleConstantTerm", "normalize", "NormalizedModule", "NotAbelian", "NotNormalized",
    "parse_module_file", "parse_module_text", "ParseError", "phi_of", "Place", "Poly",
    "PrecisionExhausted", "PresentationBoundFailure", "RatFunc", "SkewPoly",
    "small_torsion_excluded", "sp_eval", "TailBoundFailure", "TmodError", "torsion_module",
    "tps_eval", "tps_invert", "TwistedSeries", "validate_module", "ValidationError",
    "__version__",
]

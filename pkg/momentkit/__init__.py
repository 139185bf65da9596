"""
momentkit - classical moment problems from finite moment prefixes.
"""

__version__ = "0.1.0"

from .errors import MomentError, ValidationError, NumericalError
from .scalars import Arithmetic, PowerSeries, INFINITY
from .config import Config, DEFAULT_CONFIG
from .moments import Kind, MomentSequence, normalize, generate
from .hankel import Verdict, existence_check, hankel_dets, aux_dets
from .orthopoly import RecursionCoefficients, recursion_coeffs, eval_P, eval_Q
from .jacobi import Variant, JacobiSection, Quadrature, section, eigensystem
from .pade import pade_value, pade_table
from .nevanlinna import abcd, weyl_disk, pick_test
from .determinacy import Determinacy, classify

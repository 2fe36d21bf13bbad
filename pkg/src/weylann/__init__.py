"""Exact annihilators of f^lam (log f)^m in the Weyl algebra."""
from .annfs import PreconditionError, ann_fs, bfct, nu0
from .groebner import GBasis, buchberger_reduced, eliminate, normal_form, submodules_equal, syzygy_basis
from .holonomy import HilbertData, ZeroModuleError, bernstein_dimension, hilbert_data, hilbert_polynomial, initial_module, is_holonomic
from .logann import (
    AnnLogResult,
    ann_lambda_log,
    derive_vectors,
    euler_operator,
    extract_top_annihilator,
    module_quotient_syz,
    module_quotient_tag,
)
from .opalgebra import AlgebraError, ModVector, Operator, VarTable, multiply, s_derivative, substitute_s
from .orders import TermOrder, elimination, grevlex, posfirst
from .scalars import BPoly
from .syntax import ParseError, parse_operator, parse_polynomial, render

__version__ = "0.1.0"

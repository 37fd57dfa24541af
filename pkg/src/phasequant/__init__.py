"""Phase-space quantization toolkit: symbols, ladder operators, Fock states and Husimi densities."""

from .config import Config, load_config
from .errors import CutoffError, DegreeCapError, ModeMismatchError, ParseError, TruncationWarning, UnknownVariableError
from .fock import (
    FockState,
    SBFunction,
    coherent_state,
    expectation,
    fock_state,
    parse_state,
    position_wavefunction,
    segal_bargmann_transform,
    vacuum,
)
from .operators import LadderExpr, OperatorMatrix, commutator, format_ladder, normal_order, parse_ladder, to_matrix
from .phasespace import (
    Normalization,
    exact_q_average,
    husimi_q,
    husimi_q_xp,
    q_marginal_x,
    quadrature_q_average,
    reproducing_apply,
    variance_report,
    weierstrass_smooth,
    wigner,
)
from .quadrature import QuadratureGrid
from .quantization import Scheme, convert_scheme, groenewold_residual, quantize, symbol_of, toeplitz_matrix
from .symbols import Convention, GaussianMeasure, PhaseSymbol, format_symbol, parse_symbol, poisson_bracket
from .verify import VerdictReport, VerifyConfig, run_suite

from types import ModuleType as _Module

__all__ = [n for n, v in list(globals().items()) if not n.startswith("_") and not isinstance(v, _Module)]

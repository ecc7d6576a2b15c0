"""p-adic height pairings on Tate curves: Mazur-Tate and unit-root splittings."""
from .padic import (
    BUFFER,
    DEFAULT_PREC,
    DivisionByIndistinguishableZero,
    LogBranch,
    NonSimpleRoot,
    NotAUnit,
    PadicElement,
    PadicError,
    PrecisionExhausted,
    RhoFunctional,
    from_rational,
    hensel_root,
    is_square,
    padic_log,
    padic_sqrt,
    teichmuller,
)
from .matrix import PadicMatrix, PadicPoly, charpoly
from .frobenius import FrobeniusModule, NotOrdinary, unit_root_subspace, verify_unit_root_lift
from .kedlaya import GoodCurve, frobenius_matrix
from .derham import LaurentForm, reduce_form
from .tate import BiextPoint, TateCurve
from .heights import compare_splittings, mt_splitting, unit_root_splitting_tate
from .global_height import RationalCurve, RhoFamily, global_height, global_pairing

__version__ = "0.1.0"

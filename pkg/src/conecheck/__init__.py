"""Exact certificates for linear operators preserving positivity cones.

The package decides, in exact rational arithmetic, whether a linear
differential operator with polynomial coefficients maps non-negative (SOS),
positive, or elliptic real polynomials of bounded degree into the same cone,
returning either a parametric Hankel positivity report or an explicit
counterexample polynomial with the point where its image goes wrong.
Supporting machinery covers moment sequences, convolution operators built
from atomic measures, and the multivariate kernel criteria.
"""

from .polycore import (
    MultiPoly,
    RootIsolation,
    SignResult,
    UniPoly,
    ff_inner,
    isolate_real_roots,
    nonneg_on_R,
    positive_on_R,
    squarefree_decompose,
    sturm_count,
)
from .weylops import ConstCoeffOp, MultiWeylOp, WeylOp
from .hankel import ParamHankel, build_param_hankel, pd_for_all_y, psd_at_point, psd_for_all_y
from .decide import (
    Verdict,
    Witness,
    decide_ell_bounded,
    decide_pos_bounded,
    decide_sos_bounded,
    decide_sos_unbounded,
)
from .moments import AtomicMeasureFamily, hamburger_check, recover_atoms
from .oracle import SampleSpec, falsify_preservation, verify_witness

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasureFamily",
    "ConstCoeffOp",
    "MultiPoly",
    "MultiWeylOp",
    "ParamHankel",
    "RootIsolation",
    "SampleSpec",
    "SignResult",
    "UniPoly",
    "Verdict",
    "WeylOp",
    "Witness",
    "build_param_hankel",
    "decide_ell_bounded",
    "decide_pos_bounded",
    "decide_sos_bounded",
    "decide_sos_unbounded",
    "falsify_preservation",
    "ff_inner",
    "hamburger_check",
    "isolate_real_roots",
    "nonneg_on_R",
    "pd_for_all_y",
    "positive_on_R",
    "psd_at_point",
    "psd_for_all_y",
    "recover_atoms",
    "squarefree_decompose",
    "sturm_count",
    "verify_witness",
]

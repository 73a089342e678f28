"""Lower bounds on the Hilbert-space dimension needed to realize two-party correlations."""

from .bounds import BoundReport, dimension_lower_bound, f1, f2, overlap, robustness_scan, swap_parties
from .correlation import (
    Correlation,
    SignalingReport,
    check_nonsignaling,
    from_json,
    marginal_a,
    marginal_b,
    probability,
    to_json,
    validate,
)
from .estimators import DimensionBoundTransformer, PSDRankBoundTransformer
from .generators import (
    chsh_optimal,
    deterministic,
    ffl_uniform,
    magic_square,
    mixture,
    nonconvex_mixture,
    pr_box,
    product,
    uniform,
)
from .psdrank import compare_bounds, flatten, psd_rank_f1_bound, psd_rank_fidelity_bound

__version__ = "0.1.0"

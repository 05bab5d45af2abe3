"""Consumer-optimal public market segmentation for differentiated Bertrand oligopolies."""

from segforge.designer import (
    EquilibriumOutcome,
    SigmaStar,
    TypeSegment,
    check_plausibility,
    design_sigma_star,
    supported_equilibrium,
)
from segforge.extremal import (
    ExtremalWMarket,
    WSegmentation,
    extremal_market,
    greedy_decompose,
    verify_extremal_segmentation,
)
from segforge.market import (
    DominancePartition,
    Market,
    WMarket,
    efficient_surplus,
    monopoly_demand,
    partition_by_dominance,
    reduce_to_monopoly,
    uniform_monopoly_price,
    validate_market,
    willingness_gap,
)
from segforge.verifier import (
    CandidateSegment,
    PublicEquilibriumCandidate,
    compare_to_benchmark,
    find_unsegmented_pure_equilibria,
    minimax_profit,
    minimax_report,
    verify_public_equilibrium,
)

__version__ = "0.1.0"

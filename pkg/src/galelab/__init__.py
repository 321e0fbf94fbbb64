"""Exact-arithmetic laboratory for s-gales, diagonalizing constructors and
finite-horizon dimension estimates."""

from .core import (
    GALE,
    SUPERGALE,
    ContractError,
    GaleRule,
    GaleValueTrace,
    SExponent,
    TableRule,
    combine,
    count_exceeders,
    dilate,
    exactify,
    kraft_sum,
    slack_bound_check,
    supergale_to_gale,
    union_gale_eval,
    validate,
)
from .circuits import census, circuit_size, density_check, shannon_bound_check
from .diagonal import (
    FrequencyPlan,
    NoAdmissibleBlock,
    block_constructor,
    circuit_constructor,
    frequency_constructor,
    min_branch_constructor,
    run_constructor,
)
from .dimension import (
    entropy,
    estimate_dimension,
    exponent_of_increase,
    freq_stats,
    success_probe,
    weighted_entropy,
)
from .words import PeriodicSource, PrefixSet, RuleSource, WordSource
from .zoo import (
    BlockAlphabet,
    block_gale,
    circuit_gale,
    cover_gale,
    cover_sum_gale,
    frequency_gale,
    singleton_gale,
    trivial_gale,
)

__version__ = "0.1.0"

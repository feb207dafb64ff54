"""groverbench: constant-aware Grover query bounds, geometric-sampling
estimators, Monte-Carlo emulation of the quantum subroutines, and emulated
quantum hill climbers for MAX-k-SAT."""

__version__ = "0.1.0"

from .bounds import (  # noqa: F401
    ALPHA,
    LAMBDA,
    BoundValue,
    CostModel,
    DEFAULT_MODEL,
    SearchRegime,
    boost_rounds,
    crossover_fraction,
    e_grover_upper,
    e_qmax,
    e_qmax_inf_sum,
    e_qmax_loose,
    e_qmax_tight,
    e_qsearch,
    f_upper,
    optimal_n_samples,
    qmax_timeout,
    w_qsearch,
    w_qsearch_zalka,
)
from .dilog import li2  # noqa: F401
from .estimator import (  # noqa: F401
    EpsilonBudget,
    EstimateConfig,
    EstimateOutcome,
    MarkedFractionSampler,
    estimate_qsearch,
    grover_query_estimator,
    h_estimator,
    log_bias_factor,
    sqrt_bias_factor,
    subroutine_epsilon,
)
from .hillclimb import (  # noqa: F401
    ClimberConfig,
    QueryLedger,
    classical_simple_step_cost,
    fit_scaling_exponent,
    run_climber,
    run_simple,
    run_steep,
)
from .maxsat import (  # noqa: F401
    MarkedSetTracker,
    MaxSatInstance,
    build_tracker,
    generate_instance,
    neighborhood_size,
    objective,
    read_wcnf,
    write_wcnf,
)
from .rng import make_rng  # noqa: F401

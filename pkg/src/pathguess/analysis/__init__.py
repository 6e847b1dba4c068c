"""Risk, bounds, lower-bound constructions and Gibbs calculus."""
from .bounds import (
    BoundReport,
    DKWBound,
    beta_upper_bound,
    bound_report,
    dkw_bound,
    empirical_sup_deviation,
    empirical_sup_deviation_batch,
    minimax_lower_bound,
    rate_regime_bound,
    regime_of,
    sample_size_bound,
    subcritical_bound,
    supercritical_bound,
)
from .gibbs import (
    DivergentSeriesError,
    GibbsGammaReport,
    PowerTail,
    gibbs_gamma,
    ising_gamma,
    ising_h0,
    ising_oscillations,
)
from .lecam import LeCamPair, bayes_error_oracle, kl_chi2, lecam_masses, lecam_pair, testing_report
from .risk import (
    MCSummary,
    MarginReport,
    RiskReport,
    beta_gap,
    excess_risk_exact,
    excess_risk_mc,
    joint_matrix,
    margin_delta,
    risk_of_codes,
)

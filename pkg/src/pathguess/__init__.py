"""Guessing unobserved coordinates of a stationary categorical process."""
from .core import (
    ComputationError,
    IndexPair,
    PathguessError,
    Sample,
    ValidationError,
    normalize_index_pair,
    window_count,
)
from .estimator import CountTable, GuessRule, count_patterns, fit, fit_guess_rule, guess
from .models import (
    BinaryARModel,
    ExactLaw,
    GammaBound,
    HiddenMarkovModel,
    IIDModel,
    MarkovModel,
    MixtureModel,
    PoissonRegModel,
    exact_finite_law,
    gamma,
    pbar,
    stationary_distribution,
    variation_sequence,
)
from .sampler import SimulationPlan, default_burn_in, derive_seed, simulate, simulate_batch

__version__ = "0.1.0"

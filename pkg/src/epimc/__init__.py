"""Exact-event-time data augmentation MCMC for stochastic SIR and SEIR models."""
from .diagnostics import SummaryStats, ess_batch_means, summarize, summarize_trace
from .errors import EpimcError, FeasibilityError, InversionError, ParseError, TieError
from .kernels import BACKEND
from .likelihood import IntensitySpec, SeirParams, SirParams, birth_loglik, seir_loglik, sir_loglik
from .observation import DailyCounts, EndpointCount, FullPath, Observation, Unobserved
from .paths import EventPath, InitialState
from .samplers import (
    GammaPrior,
    NewSamplerConfig,
    Problem,
    SEIRModel,
    SIRModel,
    run_benchmark_chain,
    run_new_chain,
)
from .simulate import RngStream, gillespie_seir, gillespie_sir, path_to_coords, sample_birth_path
from .theory import discrete_expectation, hellinger_exact, hellinger_mc

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DailyCounts",
    "EndpointCount",
    "EpimcError",
    "EventPath",
    "FeasibilityError",
    "FullPath",
    "GammaPrior",
    "InitialState",
    "IntensitySpec",
    "InversionError",
    "NewSamplerConfig",
    "Observation",
    "ParseError",
    "Problem",
    "RngStream",
    "SEIRModel",
    "SIRModel",
    "SeirParams",
    "SirParams",
    "SummaryStats",
    "TieError",
    "Unobserved",
    "birth_loglik",
    "discrete_expectation",
    "ess_batch_means",
    "gillespie_seir",
    "gillespie_sir",
    "hellinger_exact",
    "hellinger_mc",
    "path_to_coords",
    "run_benchmark_chain",
    "run_new_chain",
    "sample_birth_path",
    "seir_loglik",
    "sir_loglik",
    "summarize",
    "summarize_trace",
]

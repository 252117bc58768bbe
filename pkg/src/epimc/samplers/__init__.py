"""Posterior samplers for SIR/SEIR paths and rates."""
from .benchmark import ADD, MOVE, REMOVE, rj_step, run_benchmark_chain
from .birthprop import (
    NewSamplerConfig,
    complementary_logratio,
    propose_full_path,
    propose_partial_path,
    run_new_chain,
)
from .models import SEIRModel, SIRModel
from .state import (
    AugmentedState,
    ChainTrace,
    GammaPrior,
    Problem,
    draw_rate_conditional,
    draw_t0,
    initialize,
    mh_move_event_time,
    single_site_sweep,
    update_params,
    update_t0,
)

__all__ = [
    "ADD", "MOVE", "REMOVE", "rj_step", "run_benchmark_chain",
    "NewSamplerConfig", "complementary_logratio", "propose_full_path",
    "propose_partial_path", "run_new_chain", "SEIRModel", "SIRModel",
    "AugmentedState", "ChainTrace", "GammaPrior", "Problem",
    "draw_rate_conditional", "draw_t0", "initialize", "mh_move_event_time",
    "single_site_sweep", "update_params", "update_t0",
]

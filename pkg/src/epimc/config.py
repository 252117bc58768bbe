"""Run configuration: a flat ``key = value`` file.

Recognised keys (input paths are relative to the config file, output paths
to the working directory)::

    model        sir | seir
    sampler      new | benchmark
    N, S0, E0, I0, R0    initial state (S0 defaults to N - E0 - I0 - R0)
    T            horizon (defaults to the data)
    removals     removal-time file (SIR, observed y)
    events       event CSV (process,time) for observed processes
    observed     processes of the event CSV that are fully observed
    endpoint     processes of the event CSV known only through their count
    daily        day,confirmed,removed CSV (SEIR y and z)
    latent_start true to make the window start a latent first-infection time
    theta0       rate of the exponential prior on the first-infection time
    change_point time where beta1 switches to beta2 (SEIR)
    prior.<p>    "a b" Gamma shape and rate
    fixed.<p>    fixed value of a rate
    init.<p>     "lo hi" initial count range of a latent process, or a rate value
    init.t0      initial first-infection time
    iters, burn_in, seed
    c, c.<p>, subset, tune_target   birth-proposal settings
    trace, summary                  output paths
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError
from .io import load_daily_counts, load_removal_times, read_events_csv, read_keyvalue
from .observation import EndpointCount, FullPath, Observation
from .paths import EventPath, InitialState
from .samplers import GammaPrior, NewSamplerConfig, Problem, SEIRModel, SIRModel

__all__ = ["RunConfig", "load_config", "build_problem"]

KNOWN = {
    "model", "sampler", "N", "S0", "E0", "I0", "R0", "T", "removals", "events",
    "observed", "endpoint", "daily", "latent_start", "theta0", "change_point",
    "iters", "burn_in", "seed", "c", "subset", "tune_target", "trace", "summary",
}
PREFIXES = ("prior.", "fixed.", "init.", "c.")


@dataclass
class RunConfig:
    model: str = "sir"
    sampler: str = "new"
    values: dict = field(default_factory=dict)
    base: Path = Path(".")
    source: Path | None = None

    def get(self, key, default=None):
        return self.values.get(key, default)

    def path(self, key):
        v = self.values.get(key)
        if v is None:
            return None
        p = Path(v)
        return p if p.is_absolute() else self.base / p

    def number(self, key, default=None, kind=float):
        v = self.values.get(key)
        if v is None:
            return default
        try:
            return kind(v)
        except ValueError:
            raise ParseError(f"{key} must be a number, got {v!r}", self.source) from None

    def pair(self, key):
        parts = self.values[key].split()
        if len(parts) != 2:
            raise ParseError(f"{key} needs two numbers", self.source)
        try:
            return float(parts[0]), float(parts[1])
        except ValueError:
            raise ParseError(f"{key} needs two numbers", self.source) from None

    def flag(self, key, default=False):
        v = self.values.get(key)
        if v is None:
            return default
        if v.lower() in ("1", "true", "yes", "on"):
            return True
        if v.lower() in ("0", "false", "no", "off"):
            return False
        raise ParseError(f"{key} must be true or false", self.source)

    @property
    def iters(self):
        return self.number("iters", 1000, int)

    @property
    def burn_in(self):
        return self.number("burn_in", 0, int)

    @property
    def seed(self):
        return self.number("seed", None, int)

    def sampler_config(self, seed=None) -> NewSamplerConfig:
        c_per = {k[2:]: float(v) for k, v in self.values.items() if k.startswith("c.")}
        return NewSamplerConfig(
            c=self.number("c", 1.0),
            iters=self.iters,
            burn_in=self.burn_in,
            seed=seed if seed is not None else (self.seed or 0),
            subset=self.get("subset", "bernoulli"),
            tune_target=self.number("tune_target"),
            c_per_target=c_per,
        )


def load_config(path, overrides=None) -> RunConfig:
    path = Path(path)
    values = read_keyvalue(path)
    values.update(overrides or {})
    for key in values:
        if key not in KNOWN and not key.startswith(PREFIXES):
            raise ParseError(f"unknown key {key!r}", path)
    model = values.get("model", "sir")
    if model not in ("sir", "seir"):
        raise ParseError(f"model must be sir or seir, got {model!r}", path)
    sampler = values.get("sampler", "new")
    if sampler not in ("new", "benchmark"):
        raise ParseError(f"sampler must be new or benchmark, got {sampler!r}", path)
    return RunConfig(model, sampler, values, path.parent, path)


def _init_state(cfg: RunConfig):
    if cfg.get("N") is None:
        return None
    N = cfg.number("N", kind=int)
    I0 = cfg.number("I0", 1, int)
    E0 = cfg.number("E0", 0, int)
    R0 = cfg.number("R0", 0, int)
    S0 = cfg.number("S0", N - I0 - E0 - R0, int)
    return InitialState(N, S0, I0, E0, R0)


def _observation(cfg: RunConfig, init):
    T = cfg.number("T")
    if cfg.get("removals") is not None:
        return load_removal_times(
            cfg.path("removals"), init=init, horizon=T, latent_start=cfg.flag("latent_start", True)
        )
    if init is None:
        raise ParseError("N (and the rest of the initial state) is required", cfg.source)
    if cfg.get("daily") is not None:
        obs = load_daily_counts(cfg.path("daily"), init)
        if T is not None and T != obs.T:
            raise ParseError("T disagrees with the number of days", cfg.source)
        return obs
    if cfg.get("events") is not None:
        if T is None:
            raise ParseError("T is required with an event file", cfg.source)
        events = read_events_csv(cfg.path("events"))
        procs = {}
        for name in cfg.get("observed", "").replace(",", " ").split():
            procs[name] = FullPath(EventPath(events.get(name, []), T))
        for name in cfg.get("endpoint", "").replace(",", " ").split():
            procs[name] = EndpointCount(int(len(events.get(name, []))))
        return Observation(init, T, procs)
    raise ParseError("config needs one of removals, daily or events", cfg.source)


def build_problem(cfg: RunConfig) -> Problem:
    init = _init_state(cfg)
    obs = _observation(cfg, init)
    init = obs.init
    if cfg.model == "sir":
        model = SIRModel(init)
    else:
        model = SEIRModel(init, cfg.number("change_point"))
    priors, fixed, init_counts, init_params = {}, {}, {}, {}
    for key in cfg.values:
        if key.startswith("prior."):
            priors[key[6:]] = GammaPrior(*cfg.pair(key))
        elif key.startswith("fixed."):
            fixed[key[6:]] = cfg.number(key)
        elif key.startswith("init.") and key != "init.t0":
            name = key[5:]
            if name in model.processes:
                lo, hi = cfg.pair(key)
                init_counts[name] = (int(lo), int(hi))
            else:
                init_params[name] = cfg.number(key)
    for name in list(priors) + list(fixed):
        if name not in model.param_names:
            raise ParseError(f"unknown parameter {name!r} for model {cfg.model}", cfg.source)
    try:
        return Problem(
            model,
            obs,
            priors=priors,
            fixed=fixed,
            theta0=cfg.number("theta0"),
            init_counts=init_counts,
            init_params=init_params,
            init_t0=cfg.number("init.t0"),
        )
    except ValueError as exc:
        raise ParseError(str(exc), cfg.source) from None

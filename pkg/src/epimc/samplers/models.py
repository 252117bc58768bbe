"""SIR and SEIR model adapters used by the samplers.

Paths are plain sorted ``float64`` arrays of absolute times; the window
``(t0, T)`` travels separately so the latent first-infection time can move it.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..likelihood import (
    SeirParams,
    SirParams,
    birth_loglik,
    seir_intensity_x,
    seir_intensity_y,
    seir_intensity_z,
    seir_loglik,
    sir_intensity_x,
    sir_intensity_y,
    sir_loglik,
)
from ..paths import InitialState

__all__ = ["SIRModel", "SEIRModel"]


class SIRModel:
    kind = "sir"
    processes = ("x", "y")
    param_names = ("beta", "gamma")
    # factors whose intensity depends on the keyed process
    dependents = {"x": ("y",), "y": ("x",)}
    # (source compartment emptied by a jump, process refilling it)
    feeders = {"x": ("I", None), "y": ("I", "x")}
    # process emptying each compartment
    drains = {"I": "y"}

    def __init__(self, init: InitialState):
        if init.E0:
            raise ValueError("SIR model needs E0 == 0")
        self.init = init

    def params(self, values) -> SirParams:
        return SirParams(values["beta"], values["gamma"])

    def loglik(self, paths, values, window):
        return sir_loglik(paths["x"], paths["y"], self.init, self.params(values), window)

    def intensity(self, name, paths, values, window):
        if name == "x":
            return sir_intensity_x(paths["y"], self.init, values["beta"], window)
        if name == "y":
            return sir_intensity_y(paths["x"], self.init, values["gamma"], window)
        raise KeyError(name)

    def factor(self, name, paths, values, window):
        return birth_loglik(paths[name], self.intensity(name, paths, values, window))

    def rate_stats(self, paths, window):
        """``{param: (event count, exposure)}`` for the Gamma full conditionals."""
        t0, T = window
        int_SI, int_I, _, _, _ = kernels.sir_sweep(
            paths["x"], paths["y"], self.init.S0, self.init.I0, t0, T
        )
        return {
            "beta": (paths["x"].size, int_SI / self.init.N),
            "gamma": (paths["y"].size, int_I),
        }

    def first_segment_rate(self, values):
        """Total event rate while only the initial infectives are present."""
        i = self.init
        return values["gamma"] * i.I0 + values["beta"] * i.S0 * i.I0 / i.N

    def blocking_jump(self, paths, window):
        """First ``(process, time)`` whose jump happens at zero rate, or None."""
        x, y = paths["x"], paths["y"]
        S, I = self.init.S0, self.init.I0
        i = j = 0
        while i < x.size or j < y.size:
            if j >= y.size or (i < x.size and x[i] < y[j]):
                if S <= 0 or I <= 0:
                    return "x", x[i]
                S -= 1
                I += 1
                i += 1
            else:
                if I <= 0:
                    return "y", y[j]
                I -= 1
                j += 1
        return None


class SEIRModel:
    kind = "seir"
    processes = ("x", "y", "z")
    dependents = {"x": ("y",), "y": ("x", "z"), "z": ("x",)}
    feeders = {"x": ("I", "y"), "y": ("E", "x"), "z": ("I", "y")}
    drains = {"E": "y", "I": "z"}

    def __init__(self, init: InitialState, change_point=None):
        self.init = init
        self.change_point = change_point

    @property
    def param_names(self):
        if self.change_point is None:
            return ("beta1", "alpha", "gamma")
        return ("beta1", "beta2", "alpha", "gamma")

    def params(self, values) -> SeirParams:
        if self.change_point is None:
            return SeirParams(values["beta1"], values["alpha"], values["gamma"])
        return SeirParams(
            values["beta1"],
            values["alpha"],
            values["gamma"],
            beta2=values["beta2"],
            change_point=self.change_point,
        )

    def loglik(self, paths, values, window):
        return seir_loglik(
            paths["x"], paths["y"], paths["z"], self.init, self.params(values), window
        )

    def intensity(self, name, paths, values, window):
        p = self.params(values)
        if name == "x":
            return seir_intensity_x(paths["y"], paths["z"], self.init, p, window)
        if name == "y":
            return seir_intensity_y(paths["x"], self.init, p, window)
        if name == "z":
            return seir_intensity_z(paths["y"], self.init, p, window)
        raise KeyError(name)

    def factor(self, name, paths, values, window):
        return birth_loglik(paths[name], self.intensity(name, paths, values, window))

    def rate_stats(self, paths, window):
        t0, T = window
        cp = T if self.change_point is None else max(min(self.change_point, T), t0)
        int1, int2, int_E, int_I, nx1, _, _, _, _ = kernels.seir_sweep(
            paths["x"], paths["y"], paths["z"],
            self.init.S0, self.init.E0, self.init.I0, t0, T, cp,
        )
        N = self.init.N
        stats = {
            "alpha": (paths["y"].size, int_E),
            "gamma": (paths["z"].size, int_I),
        }
        if self.change_point is None:
            stats["beta1"] = (paths["x"].size, (int1 + int2) / N)
        else:
            stats["beta1"] = (nx1, int1 / N)
            stats["beta2"] = (paths["x"].size - nx1, int2 / N)
        return stats

    def first_segment_rate(self, values):
        raise NotImplementedError("a latent first-infection time is only supported for SIR")

    def blocking_jump(self, paths, window):
        x, y, z = paths["x"], paths["y"], paths["z"]
        S, E, I = self.init.S0, self.init.E0, self.init.I0
        i = j = m = 0
        inf = np.inf
        while i < x.size or j < y.size or m < z.size:
            tx = x[i] if i < x.size else inf
            ty = y[j] if j < y.size else inf
            tz = z[m] if m < z.size else inf
            if tx <= ty and tx <= tz:
                if S <= 0 or I <= 0:
                    return "x", tx
                S -= 1
                E += 1
                i += 1
            elif ty <= tz:
                if E <= 0:
                    return "y", ty
                E -= 1
                I += 1
                j += 1
            else:
                if I <= 0:
                    return "z", tz
                I -= 1
                m += 1
        return None

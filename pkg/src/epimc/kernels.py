"""Hot-loop kernels: compiled extension when available, pure Python otherwise.

Set ``EPIMC_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the
implementation actually in use.
"""
import os

from . import _kernels_py

if os.environ.get("EPIMC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

sir_sweep = _impl.sir_sweep
seir_sweep = _impl.seir_sweep
birth_loglik = _impl.birth_loglik
path_to_coords = _impl.path_to_coords
coords_to_path = _impl.coords_to_path

__all__ = [
    "BACKEND",
    "sir_sweep",
    "seir_sweep",
    "birth_loglik",
    "path_to_coords",
    "coords_to_path",
]

"""Reading data files and writing traces/event tables."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
import re
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ParseError
from .observation import DailyCounts, FullPath, Observation
from .paths import EventPath, InitialState
from .samplers.state import ChainTrace

__all__ = [
    "TIE_JITTER",
    "bundled",
    "read_keyvalue",
    "load_removal_times",
    "load_daily_counts",
    "write_events_csv",
    "read_events_csv",
    "write_trace_csv",
    "read_trace_csv",
    "write_table_csv",
    "sha256_of",
    "verify_checksum",
]

log = logging.getLogger("epimc.io")

TIE_JITTER = 1e-6
FMT = "%.17g"
TRACE_COLUMN = re.compile(r"^(chain|iteration|loglik|t0|beta[012]?|gamma|alpha|eps|(n|acc|move)_[xyz])$")


def bundled(name) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("epimc") / "data" / name))


def _lines(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def read_keyvalue(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for i, line in _lines(path):
        if "=" not in line:
            raise ParseError(f"expected key = value, got {line!r}", path, i)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", path, i)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", path, i)
        out[key] = value
    return out


def _init_from_meta(meta, path):
    try:
        N = int(meta["N"])
        I0 = int(meta.get("I0", 1))
        E0 = int(meta.get("E0", 0))
        R0 = int(meta.get("R0", 0))
        S0 = int(meta.get("S0", N - I0 - E0 - R0))
        return InitialState(N, S0, I0, E0, R0)
    except KeyError:
        raise ParseError("metadata needs N", path) from None
    except ValueError as exc:
        raise ParseError(f"bad metadata ({exc})", path) from None


def _companion_meta(path):
    path = Path(path)
    meta = path.with_suffix(".meta")
    return meta if meta.exists() else None


def _jitter_ties(times, path):
    out = times.copy()
    rank = 0
    for i in range(1, times.size):
        rank = rank + 1 if times[i] == times[i - 1] else 0
        out[i] += rank * TIE_JITTER
    if np.any(np.diff(out) <= 0):
        raise ParseError("tie jitter collides with a neighbouring time", path)
    return out


def load_removal_times(path, init: InitialState | None = None, horizon=None, latent_start=True, start=0.0):
    """Removal times, one per line, as an SIR observation of ``y``.

    Equal times are separated by ``k * 1e-6`` (``k`` = rank within the tie)
    and reported through the ``epimc.io`` logger. ``init`` defaults to the
    companion ``.meta`` file. With ``latent_start`` the window start is the
    unknown first-infection time; otherwise it is ``start``.
    """
    vals = []
    for i, line in _lines(path):
        try:
            t = float(line)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", path, i) from None
        if not math.isfinite(t) or t < 0:
            raise ParseError(f"removal time must be finite and non-negative, got {line}", path, i)
        if vals and t < vals[-1]:
            raise ParseError("removal times must be non-decreasing", path, i)
        vals.append(t)
    if not vals:
        raise ParseError("no removal times", path)
    times = np.array(vals)
    if np.any(np.diff(times) == 0):
        n = int(np.sum(np.diff(times) == 0))
        log.warning("%s: %d tied removal time(s) jittered by k*%g", path, n, TIE_JITTER)
        times = _jitter_ties(times, path)
    if init is None:
        meta = _companion_meta(path)
        if meta is None:
            raise ParseError("no InitialState given and no companion .meta file", path)
        init = _init_from_meta(read_keyvalue(meta), meta)
    T = float(times[-1]) if horizon is None else float(horizon)
    if T < times[-1]:
        raise ParseError(f"horizon {T} is before the last removal", path)
    if latent_start:
        return Observation(init, T, {"y": FullPath(EventPath(times, T, start=-math.inf))}, start=None)
    return Observation(init, T, {"y": FullPath(EventPath(times, T, start=start))}, start=start)


def load_daily_counts(path, init: InitialState, day_length=1.0):
    """Daily counts CSV with header ``day,confirmed,removed``.

    ``confirmed`` counts onsets (``y``) and ``removed`` counts removals
    (``z``) of the SEIR model. Days must be consecutive integers.
    """
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", path)
        if [h.strip() for h in header] != ["day", "confirmed", "removed"]:
            raise ParseError(f"header must be day,confirmed,removed, got {','.join(header)}", path, 1)
        days, conf, rem = [], [], []
        for i, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError("expected 3 columns", path, i)
            try:
                d, c, r = (int(v) for v in row)
            except ValueError:
                raise ParseError(f"non-integer field in {row}", path, i) from None
            if c < 0 or r < 0:
                raise ParseError("counts must be non-negative", path, i)
            if days and d != days[-1] + 1:
                raise ParseError(f"day {d} does not follow day {days[-1]}", path, i)
            days.append(d)
            conf.append(c)
            rem.append(r)
    if not days:
        raise ParseError("no data rows", path)
    T = len(days) * day_length
    y = DailyCounts(np.array(conf), day_length)
    z = DailyCounts(np.array(rem), day_length)
    return Observation(init, T, {"y": y, "z": z}, start=0.0)


def write_events_csv(path, paths: dict):
    """Event table with header ``process,time``, rows sorted by time."""
    rows = sorted((float(t), name) for name, arr in paths.items() for t in np.asarray(arr))
    with open(path, "w", newline="") as fh:
        fh.write("process,time\n")
        for t, name in rows:
            fh.write(f"{name},{FMT % t}\n")


def read_events_csv(path, processes=("x", "y", "z")):
    """Inverse of :func:`write_events_csv`; returns ``{process: times}``."""
    path = Path(path)
    out = {}
    lines = list(_raw_rows(path))
    if not lines or lines[0][1] != ["process", "time"]:
        raise ParseError("header must be process,time", path, 1)
    for i, row in lines[1:]:
        if len(row) != 2:
            raise ParseError("expected 2 columns", path, i)
        name, val = row
        if name not in processes:
            raise ParseError(f"unknown process {name!r}", path, i)
        try:
            out.setdefault(name, []).append(float(val))
        except ValueError:
            raise ParseError(f"not a number: {val!r}", path, i) from None
    return {k: np.sort(np.array(v)) for k, v in out.items()}


def _raw_rows(path):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    with fh:
        for i, row in enumerate(csv.reader(fh), start=1):
            if row:
                yield i, [c.strip() for c in row]


def write_table_csv(path, columns: dict):
    """Columns of equal length to CSV; floats written with 17 significant digits."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n = len(arrays[0]) if arrays else 0
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(a[i]) for a in arrays) + "\n")


def _fmt(v):
    if isinstance(v, (str, np.str_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return FMT % v


def write_trace_csv(path, trace: ChainTrace):
    write_table_csv(path, trace.columns)


def read_trace_csv(path) -> ChainTrace:
    rows = list(_raw_rows(path))
    if not rows:
        raise ParseError("empty trace file", path)
    names = rows[0][1]
    if names[0] != "iteration" and names[:2] != ["chain", "iteration"]:
        raise ParseError("trace header must start with iteration", path, 1)
    for name in names:
        if not TRACE_COLUMN.match(name):
            raise ParseError(f"unknown trace column {name!r}", path, 1)
    if len(set(names)) != len(names):
        raise ParseError("duplicate trace column", path, 1)
    trace = ChainTrace(names)
    for i, row in rows[1:]:
        if len(row) != len(names):
            raise ParseError(f"expected {len(names)} columns", path, i)
        try:
            trace.append({k: float(v) for k, v in zip(names, row)})
        except ValueError:
            raise ParseError("non-numeric trace value", path, i) from None
    return trace


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def verify_checksum(path, checksum_file) -> bool:
    """True when ``path`` hashes to the first token of ``checksum_file``."""
    expected = Path(checksum_file).read_text().split()
    return bool(expected) and expected[0].lower() == sha256_of(path)

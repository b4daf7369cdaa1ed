"""Monte Carlo protocols: coherence ccdf, non-uniform, uniform and MMV sweeps.

Every random draw comes from :func:`derive_trial_seed`, so a sweep is a pure
function of its configuration. Position draws depend only on ``(M, N, trial)``
and scene/noise draws on ``(M, N, trial, inner)``. Trial ``t`` of the
non-uniform protocol therefore coincides with inner trial 0 of outer draw ``t``
in the uniform protocol, which makes the uniform error event a superset of
the non-uniform one trial by trial.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bounds import coherence_ccdf_bound
from .geometry import (INDEPENDENT, MODES, TRANSCEIVER, ArrayConfig, ConfigurationError,
                       canonical_grid, sample_positions)
from .model import build_matrix, observe, sigma_from_snr, synthesize_scene
from .pattern_stats import CCDF_HEADER, coherence_from_positions, empirical_ccdf
from .recovery import METHODS, RecoveryProblem, recover, support_error

log = logging.getLogger(__name__)

PROTOCOLS = ("ccdf", "nonuniform", "uniform", "mmv")

CSV_HEADER = ("protocol", "method", "M", "N", "MN", "Z", "G", "K", "P", "snr_db", "trials",
              "errors", "error_rate", "mean_runtime_ms", "base_seed")


def derive_trial_seed(base_seed: int, tag: str, trial: int, inner: int = 0) -> int:
    """64-bit seed hashed from ``(base_seed, tag, trial, inner)``."""
    msg = f"{int(base_seed)}|{tag}|{int(trial)}|{int(inner)}".encode()
    return int.from_bytes(hashlib.sha256(msg).digest()[:8], "little")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def parse_methods(text: str):
    """Parse ``"lasso;mbmp:d=3,3,1;focuss:p_norm=0.8"`` into ``(name, params)`` pairs."""
    out = []
    for token in filter(None, (t.strip() for t in text.split(";"))):
        name, *pairs = token.split(":")
        name = name.strip()
        if name not in METHODS:
            raise ConfigurationError(f"unknown method {name!r}")
        params = {}
        for pair in pairs:
            if "=" not in pair:
                raise ConfigurationError(f"bad method parameter {pair!r} in {token!r}")
            k, v = pair.split("=", 1)
            params[k.strip()] = _parse_value(v.strip())
        out.append((name, params))
    return out


def format_methods(methods) -> str:
    parts = []
    for name, params in methods:
        items = [name] + [f"{k}={_format_value(v)}" for k, v in params.items()]
        parts.append(":".join(items))
    return ";".join(parts)


def _parse_value(v: str):
    if "," in v:
        return [_parse_value(x) for x in v.split(",")]
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def _format_value(v):
    return ",".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v)


def parse_mn_list(text: str):
    """``"3x3,4x4"`` or ``"3,4"`` (square) into ``[(3, 3), (4, 4)]``."""
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if "x" in tok:
            m, n = tok.split("x")
            out.append((int(m), int(n)))
        else:
            out.append((int(tok), int(tok)))
    return out


@dataclass
class ExperimentConfig:
    protocol: str = "nonuniform"
    Z: int = 50
    G: int = None
    K: int = 3
    P: int = 1
    snr_db: float = 20.0
    mn_list: list = field(default_factory=lambda: [(m, m) for m in range(3, 9)])
    trials: int = 200
    inner_trials: int = 500
    methods: list = field(default_factory=lambda: parse_methods(
        "beamform;omp;ols;cosamp;focuss;lasso;mbmp:d=3,3,1"))
    base_seed: int = 0
    mode: str = INDEPENDENT
    q_grid: list = None
    timing: bool = False

    def __post_init__(self):
        if self.G is None:
            self.G = int(self.Z) + 1
        if isinstance(self.methods, str):
            self.methods = parse_methods(self.methods)
        if isinstance(self.mn_list, str):
            self.mn_list = parse_mn_list(self.mn_list)
        self.mn_list = [tuple(int(v) for v in mn) for mn in self.mn_list]
        self.validate()

    def validate(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigurationError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.protocol == "uniform" and self.inner_trials < 1:
            raise ConfigurationError("the uniform protocol needs inner_trials >= 1")
        if self.G != int(self.Z) + 1:
            raise ConfigurationError(f"canonical grid for Z={self.Z} has G={int(self.Z) + 1}, got {self.G}")
        if not self.mn_list:
            raise ConfigurationError("mn_list is empty")
        if self.protocol != "ccdf":
            if self.K < 1 or self.K >= self.G:
                raise ConfigurationError(f"need 1 <= K < G, got K={self.K}")
            if self.P < 1:
                raise ConfigurationError("P must be >= 1")
            if self.protocol == "mmv" and self.P < 2:
                raise ConfigurationError("the mmv protocol needs P >= 2")
            if not self.methods:
                raise ConfigurationError("no methods selected")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


_INT_KEYS = ("Z", "G", "K", "P", "trials", "inner_trials", "base_seed")
_FLOAT_KEYS = ("snr_db",)


def load_config(path, protocol: str = None) -> ExperimentConfig:
    """Read a ``key = value`` INI file; section name = protocol.

    A ``[DEFAULT]`` section applies to all protocols. When ``protocol`` is
    omitted the file must contain exactly one protocol section.
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(path):
        raise OSError(f"cannot read config file {path}")
    sections = cp.sections()
    if protocol is None:
        if len(sections) != 1:
            raise ConfigurationError(f"{path}: expected one protocol section, found {sections}")
        protocol = sections[0]
    if protocol not in cp:
        raise ConfigurationError(f"{path}: no [{protocol}] section")
    return config_from_mapping(dict(cp[protocol]), protocol)


def config_from_mapping(raw: dict, protocol: str) -> ExperimentConfig:
    kw = {"protocol": protocol}
    for key, val in raw.items():
        if key in _INT_KEYS:
            kw[key] = int(val)
        elif key in _FLOAT_KEYS:
            kw[key] = float(val)
        elif key == "mn_list":
            kw[key] = parse_mn_list(val)
        elif key == "methods":
            kw[key] = parse_methods(val)
        elif key == "mode":
            kw[key] = val.strip()
        elif key == "q_grid":
            kw[key] = [float(v) for v in val.split(",")]
        elif key == "timing":
            kw[key] = val.strip().lower() in ("1", "true", "yes", "on")
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    return ExperimentConfig(**kw)


def _square(ms):
    return [(m, m) for m in ms]


PRESETS = {
    "paper-fig2": dict(protocol="ccdf", Z=250, mn_list=_square([10, 15, 20]), trials=2000),
    "fig3": dict(protocol="nonuniform", Z=250, K=5, P=1, snr_db=20.0,
                 mn_list=_square(range(5, 16)), trials=1000,
                 methods=parse_methods("beamform;omp;ols;cosamp;focuss;lasso;mbmp:d=2,2,2,2,1")),
    "fig4": dict(protocol="uniform", Z=250, K=5, P=1, snr_db=20.0,
                 mn_list=_square(range(5, 16)), trials=100, inner_trials=500,
                 methods=parse_methods("omp;ols;cosamp;focuss;lasso;mbmp:d=3,3,3,3,1")),
    "fig5": dict(protocol="mmv", Z=250, K=5, P=5, snr_db=20.0,
                 mn_list=_square([3, 4, 5, 6, 7]), trials=1000,
                 methods=parse_methods("music;raormp;focuss;mbmp:d=2,2,2,2,1")),
}


def preset(name: str, **overrides) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    kw = dict(PRESETS[name])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    """Aggregated error statistics for one (method, M, N) cell."""

    protocol: str
    method: str
    M: int
    N: int
    Z: int
    G: int
    K: int
    P: int
    snr_db: float
    trials: int
    errors: int
    base_seed: int
    runtime_s: float = None
    failures: int = 0

    @property
    def MN(self) -> int:
        return self.M * self.N

    @property
    def error_rate(self) -> float:
        return self.errors / self.trials

    @property
    def mean_runtime_ms(self):
        return None if self.runtime_s is None else 1000.0 * self.runtime_s / self.trials

    def row(self):
        rt = self.mean_runtime_ms
        return (self.protocol, self.method, self.M, self.N, self.MN, self.Z, self.G, self.K,
                self.P, repr(float(self.snr_db)), self.trials, self.errors,
                repr(self.error_rate), "" if rt is None else f"{rt:.3f}", self.base_seed)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


def records_table(records):
    """``{method: {MN: error_rate}}`` view for quick comparisons."""
    out = {}
    for r in records:
        out.setdefault(r.method, {})[r.MN] = r.error_rate
    return out


# ---------------------------------------------------------------------------
# Trial workers (module level so they pickle for process pools)
# ---------------------------------------------------------------------------

def _label(name, params):
    return format_methods([(name, params)])


def _setup(cfg: ExperimentConfig, M, N):
    arr = ArrayConfig(M, N, cfg.Z, mode=cfg.mode)
    return arr, canonical_grid(cfg.Z)


def _positions(cfg, arr, M, N, t):
    return sample_positions(arr, derive_trial_seed(cfg.base_seed, f"pos:{M}x{N}", t))


def _problem(cfg, A, grid, M, N, t, inner):
    scene = synthesize_scene(grid, cfg.K, cfg.P,
                             derive_trial_seed(cfg.base_seed, f"scene:{M}x{N}", t, inner))
    sigma = sigma_from_snr(cfg.snr_db)
    Y = observe(A, scene, sigma, derive_trial_seed(cfg.base_seed, f"noise:{M}x{N}", t, inner))
    return RecoveryProblem(A, Y, cfg.K, sigma), scene


def _attempt(name, params, problem, scene, timing):
    t0 = time.perf_counter() if timing else 0.0
    failed = False
    try:
        err = support_error(recover(name, problem, **params).support, scene.support)
    except Exception as exc:  # solver failure counts as an error
        log.warning("%s failed: %s", name, exc)
        err, failed = 1, True
    dt = time.perf_counter() - t0 if timing else 0.0
    return err, dt, failed


def _nonuniform_trial(cfg: ExperimentConfig, M: int, N: int, t: int):
    arr, grid = _setup(cfg, M, N)
    A = build_matrix(arr, _positions(cfg, arr, M, N, t), grid, normalized=True)
    problem, scene = _problem(cfg, A, grid, M, N, t, 0)
    return [_attempt(name, params, problem, scene, cfg.timing) for name, params in cfg.methods]


def _uniform_trial(cfg: ExperimentConfig, M: int, N: int, t: int):
    """Outer draw ``t``: a method fails once any inner trial fails for it."""
    arr, grid = _setup(cfg, M, N)
    A = build_matrix(arr, _positions(cfg, arr, M, N, t), grid, normalized=True)
    out = [[0, 0.0, False] for _ in cfg.methods]
    alive = list(range(len(cfg.methods)))
    for inner in range(cfg.inner_trials):
        if not alive:
            break
        problem, scene = _problem(cfg, A, grid, M, N, t, inner)
        still = []
        for i in alive:
            name, params = cfg.methods[i]
            err, dt, failed = _attempt(name, params, problem, scene, cfg.timing)
            out[i][1] += dt
            out[i][2] = out[i][2] or failed
            if err:
                out[i][0] = 1
            else:
                still.append(i)
        alive = still
    return [tuple(o) for o in out]


def _ccdf_trial(cfg: ExperimentConfig, M: int, N: int, t: int):
    arr, grid = _setup(cfg, M, N)
    return coherence_from_positions(_positions(cfg, arr, M, N, t), grid)


def _run_items(fn, cfg, items, jobs):
    """Evaluate ``fn(cfg, M, N, t)`` for each item, in item order."""
    if jobs is None or jobs <= 1:
        return [fn(cfg, *it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        chunk = max(1, len(items) // (4 * jobs))
        return list(ex.map(fn, *zip(*[(cfg,) + tuple(it) for it in items]), chunksize=chunk))


def _run_recovery(cfg: ExperimentConfig, fn, jobs):
    items = [(M, N, t) for M, N in cfg.mn_list for t in range(cfg.trials)]
    results = _run_items(fn, cfg, items, jobs)
    records = []
    for c, (M, N) in enumerate(cfg.mn_list):
        cell = results[c * cfg.trials:(c + 1) * cfg.trials]
        for i, (name, params) in enumerate(cfg.methods):
            errs = sum(r[i][0] for r in cell)
            fails = sum(int(r[i][2]) for r in cell)
            rt = sum(r[i][1] for r in cell) if cfg.timing else None
            records.append(ExperimentRecord(cfg.protocol, _label(name, params), M, N, cfg.Z,
                                            cfg.G, cfg.K, cfg.P, cfg.snr_db, cfg.trials, errs,
                                            cfg.base_seed, rt, fails))
    return records


# ---------------------------------------------------------------------------
# Protocols
# ---------------------------------------------------------------------------

def _expect(cfg, *protocols):
    if cfg.protocol not in protocols:
        raise ConfigurationError(f"expected protocol in {protocols}, got {cfg.protocol!r}")


def run_nonuniform(cfg: ExperimentConfig, jobs: int = 1):
    """Fresh positions, scene and noise for every trial."""
    _expect(cfg, "nonuniform", "mmv")
    return _run_recovery(cfg, _nonuniform_trial, jobs)


def run_mmv(cfg: ExperimentConfig, jobs: int = 1):
    """Non-uniform protocol with ``P >= 2`` snapshots."""
    _expect(cfg, "mmv")
    return _run_recovery(cfg, _nonuniform_trial, jobs)


def run_uniform(cfg: ExperimentConfig, jobs: int = 1):
    """Fixed ``A`` per outer draw; ``inner_trials`` scenes must all succeed."""
    _expect(cfg, "uniform")
    return _run_recovery(cfg, _uniform_trial, jobs)


@dataclass
class CcdfResult:
    q: np.ndarray
    rows: list
    samples: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CCDF_HEADER)
        for q, emp, bound, mn, mode in self.rows:
            w.writerow((repr(float(q)), repr(float(emp)), repr(float(bound)), mn, mode))
        return buf.getvalue()


def default_q_grid():
    return np.round(np.linspace(0.01, 1.0, 100), 10)


def run_ccdf(cfg: ExperimentConfig, jobs: int = 1) -> CcdfResult:
    """Empirical coherence ccdf and its bound per (M, N) over ``cfg.q_grid``."""
    _expect(cfg, "ccdf")
    q = default_q_grid() if cfg.q_grid is None else np.asarray(cfg.q_grid, dtype=float)
    items = [(M, N, t) for M, N in cfg.mn_list for t in range(cfg.trials)]
    mus = _run_items(_ccdf_trial, cfg, items, jobs)
    rows, samples = [], {}
    for c, (M, N) in enumerate(cfg.mn_list):
        s = np.array(mus[c * cfg.trials:(c + 1) * cfg.trials])
        samples[(M, N)] = s
        emp = empirical_ccdf(s, q)
        bound = coherence_ccdf_bound(q, M, N, cfg.G, cfg.mode)
        rows.extend((qi, e, b, M * N, cfg.mode) for qi, e, b in zip(q, emp, bound))
    return CcdfResult(q=q, rows=rows, samples=samples)


def run(cfg: ExperimentConfig, jobs: int = 1):
    """Dispatch on ``cfg.protocol``."""
    return {"ccdf": run_ccdf, "nonuniform": run_nonuniform, "uniform": run_uniform,
            "mmv": run_mmv}[cfg.protocol](cfg, jobs)


__all__ = ["CSV_HEADER", "CcdfResult", "ExperimentConfig", "ExperimentRecord", "PRESETS",
           "PROTOCOLS", "TRANSCEIVER", "derive_trial_seed", "format_methods", "load_config",
           "parse_methods", "parse_mn_list", "preset", "records_table", "records_to_csv", "run",
           "run_ccdf", "run_mmv", "run_nonuniform", "run_uniform", "write_records_csv"]

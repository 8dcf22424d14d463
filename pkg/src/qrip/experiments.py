"""Monte-Carlo experiments with structured configuration and reproducible outputs.

Random streams are laid out as follows. The root stream ``RngStream(seed)``
has children ``MATRIX_STREAM`` (one grandchild per matrix realization),
``VECTOR_STREAM`` (one grandchild per realization, which in turn owns one
stream per support) and ``FIXED_STREAM`` (the fixed vectors of the Rayleigh
experiment). Real and quaternion runs read the same streams, so the real
matrix is the first component of the quaternion one.

Work is cut into chunks by realization index before any worker sees it, and
every chunk is computed the same way whoever runs it, which makes output
bytes independent of the worker count.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .exceptions import ConfigError, ParameterError, VerificationError
from .gamma import (
    EmpiricalDistribution,
    GammaParams,
    ks_2samp_critical_value,
    ks_2samp_statistic,
    ks_critical_value,
    ks_statistic,
    subexp_params_for_gamma,
    subexp_tail_bound,
    tail_bound,
    verify_mgf_bound,
    write_csv,
)
from .quaternion import QUATERNION, REAL, qmul
from .rip import (
    DEFAULT_MAX_SUPPORTS,
    empirical_delta_s,
    empirical_ric_riv,
    sample_size_fixed_support,
    sample_size_rip,
)
from .sampling import GaussianSpec, RngStream, derive_key, derive_keys, gaussian_entries, sample_sparse_unit_vector, sample_support

KINDS = ("rayleigh", "ricriv", "deltas", "sample-size", "verify-mgf", "verify-tail")
FIELD_TAGS = (REAL, QUATERNION, "both")

MATRIX_STREAM = 1
VECTOR_STREAM = 2
FIXED_STREAM = 3

# realizations per work unit in the vectorized Rayleigh sampler
RAYLEIGH_CHUNK = 2000

_DEFAULTS = {
    "rayleigh": dict(field=QUATERNION, m=64, n=8, s=5, matrix_trials=1000),
    "ricriv": dict(field=REAL, m=64, n=8, s=5, matrix_trials=1000, vectors_per_support=100),
    "deltas": dict(field="both", m=64, n=256, s=32, matrix_trials=1000, total_vectors=10_000),
    "verify-tail": dict(field=QUATERNION, m=64, n=8, s=5, matrix_trials=1000),
    "sample-size": {},
    "verify-mgf": {},
}

_GRID_FIELDS = ("delta_grid", "eps_grid", "s_grid", "n_grid", "m_grid", "t_grid")
_INT_GRIDS = ("s_grid", "n_grid", "m_grid")
# command line spellings accepted in config files
_ALIASES = {"seed": "master_seed", "trials": "matrix_trials", "bins": "histogram_bins"}


@dataclass
class ExperimentConfig:
    """Everything that determines an experiment's output.

    Counts left as ``None`` take the defaults of the experiment kind when
    :meth:`resolved` is called.
    """

    kind: str
    field: str | None = None
    m: int | None = None
    n: int | None = None
    s: int | None = None
    matrix_trials: int | None = None
    vectors_per_support: int = 100
    total_vectors: int = 10_000
    master_seed: int = 0
    histogram_bins: int = 50
    out: str | None = None
    workers: int = 1
    max_supports: int = DEFAULT_MAX_SUPPORTS
    delta_grid: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    eps_grid: tuple = (0.01, 0.05)
    s_grid: tuple = (5, 10, 20)
    n_grid: tuple = (1000, 10_000)
    m_grid: tuple = (1, 4, 16, 64, 256)
    mgf_points: int = 1001
    t_grid: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)

    def resolved(self) -> "ExperimentConfig":
        """Copy with kind defaults filled in, validated."""
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {KINDS}, got {self.kind!r}")
        updates = {k: v for k, v in _DEFAULTS[self.kind].items() if getattr(self, k) is None}
        if self.out is None:
            updates["out"] = str(Path("results") / self.kind)
        cfg = replace(self, **updates)
        cfg.validate()
        return cfg

    def validate(self):
        if self.field is not None and self.field not in FIELD_TAGS:
            raise ConfigError("field", f"must be one of {FIELD_TAGS}, got {self.field!r}")
        for name in ("m", "n", "s", "matrix_trials", "vectors_per_support", "total_vectors",
                     "histogram_bins", "workers", "max_supports", "mgf_points"):
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(name, f"must be an integer >= 1, got {value!r}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed", f"must be an unsigned 64-bit integer, got {self.master_seed!r}")
        if self.kind in ("rayleigh", "ricriv", "deltas", "verify-tail"):
            for name in ("field", "m", "n", "s", "matrix_trials"):
                if getattr(self, name) is None:
                    raise ConfigError(name, f"required for kind {self.kind!r}")
            if self.s > self.n:
                raise ConfigError("s", f"must not exceed n = {self.n}, got {self.s}")
        if self.kind == "ricriv" and math.comb(self.n, self.s) > self.max_supports:
            raise ConfigError("s", f"C({self.n}, {self.s}) = {math.comb(self.n, self.s)} supports "
                                   f"exceeds max_supports = {self.max_supports}")
        for name in _GRID_FIELDS:
            grid = getattr(self, name)
            if len(grid) == 0:
                raise ConfigError(name, "grid must not be empty")
        if any(not isinstance(v, int) or v < 1 for v in self.m_grid):
            raise ConfigError("m_grid", f"entries must be integers >= 1, got {self.m_grid}")
        if any(not 0.0 <= t <= 0.5 for t in self.t_grid):
            raise ConfigError("t_grid", f"entries must lie in [0, 1/2], got {self.t_grid}")

    @property
    def field_list(self):
        return (REAL, QUATERNION) if self.field == "both" else (self.field,)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


def _parse_value(name, text):
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    if name not in kinds:
        raise ConfigError(name, "unknown configuration key")
    text = text.strip()
    try:
        if name in _GRID_FIELDS:
            cast = int if name in _INT_GRIDS else float
            return tuple(cast(item) for item in text.replace(",", " ").split())
        if name in ("kind", "field", "out"):
            return text
        return int(text, 0)
    except ValueError:
        raise ConfigError(name, f"cannot parse {text!r}") from None


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file.

    Keys are config field names or flag names, with dashes or underscores.
    """
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError("config", f"malformed file {path}: {exc}") from None
    values = {}
    for key, text in parser["config"].items():
        name = key.replace("-", "_")
        name = _ALIASES.get(name, name)
        values[name] = _parse_value(name, text)
    return values


def build_config(kind, file_values=None, overrides=None) -> ExperimentConfig:
    """Merge file values and overrides (overrides win) into a resolved config."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    file_kind = merged.pop("kind", kind)
    if file_kind != kind:
        raise ConfigError("kind", f"config file is for {file_kind!r}, not {kind!r}")
    return ExperimentConfig(kind=kind, **merged).resolved()


# --------------------------------------------------------------------------
# stream layout


def _matrix_keys(seed, trials):
    root = RngStream(seed)
    return derive_keys(root.spawn(MATRIX_STREAM).key, np.arange(trials))


def _matrix_key(seed, trial):
    return derive_key(RngStream(seed).spawn(MATRIX_STREAM).key, trial)


def _pool_stream(seed, trial) -> RngStream:
    root = RngStream(seed)
    return RngStream(seed, trial, key=derive_key(root.spawn(VECTOR_STREAM).key, trial))


def _matrix(key, m, n, field) -> np.ndarray:
    return gaussian_entries(np.uint64(key), m, n, np.arange(n), GaussianSpec(field, 1.0 / m))


def _map_chunks(func, chunks, workers):
    """Apply ``func`` to each chunk; results come back in chunk order."""
    with threadpool_limits(limits=1):
        if workers == 1:
            return [func(c) for c in chunks]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, chunks))


def _trial_chunks(trials, size):
    return [(t0, min(t0 + size, trials)) for t0 in range(0, trials, size)]


# --------------------------------------------------------------------------
# Rayleigh quotient samples


def fixed_vectors(seed, n, s, field):
    """The two fixed unit vectors of the Rayleigh experiment, sharing one support."""
    stream = RngStream(seed).spawn(FIXED_STREAM)
    S = sample_support(stream.spawn(0), n, s)
    x1 = sample_sparse_unit_vector(stream.spawn(1), n, S, field)
    x2 = sample_sparse_unit_vector(stream.spawn(2), n, S, field)
    return S, x1, x2


def rayleigh_samples(seed, m, n, s, trials, field, workers=1):
    """Rayleigh quotients of two fixed vectors over ``trials`` fresh ``N(0, 1/m)`` matrices.

    Returns an array of shape ``(trials, 2)``. Only the matrix columns on the
    fixed support are drawn.
    """
    S, x1, x2 = fixed_vectors(seed, n, s, field)
    X = np.stack([x1[S], x2[S]])
    keys = _matrix_keys(seed, trials)
    spec = GaussianSpec(field, 1.0 / m)

    def work(chunk):
        t0, t1 = chunk
        Phi = gaussian_entries(keys[t0:t1], m, n, S, spec)
        out = np.empty((t1 - t0, 2))
        for j in range(2):
            if field == REAL:
                y = np.sum(Phi[..., 0] * X[j, :, 0], axis=-1)
                out[:, j] = np.sum(y * y, axis=-1)
            else:
                y = qmul(Phi, X[j]).sum(axis=-2)
                out[:, j] = np.sum(y * y, axis=(-2, -1))
        return out

    parts = _map_chunks(work, _trial_chunks(trials, RAYLEIGH_CHUNK), workers)
    return np.concatenate(parts)


def _law(field, m) -> GammaParams:
    return GammaParams.quaternion_rayleigh(m) if field == QUATERNION else GammaParams.real_rayleigh(m)


# --------------------------------------------------------------------------
# runners


class _Outputs:
    """Collects files written by a run for the manifest."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.files = []

    def path(self, name) -> Path:
        self.files.append(name)
        return self.root / name

    def csv(self, name, header, rows):
        write_csv(self.path(name), header, rows)

    def json(self, name, payload):
        self.path(name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def distribution(self, name, samples, bins):
        dist = EmpiricalDistribution(samples, bins)
        dist.write_ecdf_csv(self.path(f"ecdf_{name}.csv"))
        dist.write_histogram_csv(self.path(f"hist_{name}.csv"))
        return dist


def run_rayleigh(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    columns, report = {}, {}
    for field in cfg.field_list:
        R = rayleigh_samples(cfg.master_seed, cfg.m, cfg.n, cfg.s, cfg.matrix_trials, field, cfg.workers)
        columns[f"{field}_x1"] = R[:, 0]
        columns[f"{field}_x2"] = R[:, 1]
        dist = outputs.distribution(f"rayleigh_{field}", R[:, 0], cfg.histogram_bins)
        outputs.distribution(f"rayleigh_{field}_x2", R[:, 1], cfg.histogram_bins)
        law = _law(field, cfg.m)
        ks = ks_statistic(dist, law)
        crit = ks_critical_value(len(dist), 0.001)
        ks2 = ks_2samp_statistic(R[:, 0], R[:, 1])
        crit2 = ks_2samp_critical_value(len(R), len(R), 0.01)
        report[field] = {
            "law": {"alpha": law.alpha, "beta": law.beta, "mean": law.mean, "variance": law.variance},
            "trials": len(dist),
            "mean": dist.mean,
            "variance": dist.variance,
            "ks": ks,
            "ks_critical_0.001": crit,
            "ks_passed": ks < crit,
            "ks_two_fixed_vectors": ks2,
            "ks_two_sample_critical_0.01": crit2,
            "same_law_passed": ks2 < crit2,
        }
    if len(cfg.field_list) == 2:
        report["variance_ratio_quaternion_to_real"] = report[QUATERNION]["variance"] / report[REAL]["variance"]
    _write_realizations(outputs, cfg.matrix_trials, columns)
    outputs.json("fit_report.json", report)
    return report


def _write_realizations(outputs, trials, columns):
    names = list(columns)
    data = [columns[k].tolist() for k in names]
    rows = ([t] + [col[t] for col in data] for t in range(trials))
    outputs.csv("realizations.csv", ["trial"] + names, rows)


def ricriv_realization(seed, trial, m, n, s, vectors_per_support, field, max_supports=DEFAULT_MAX_SUPPORTS):
    """``(ric_left, ric_right, riv_left, riv_right)`` for one matrix realization."""
    Phi = _matrix(_matrix_key(seed, trial), m, n, field)
    return empirical_ric_riv(Phi, s, vectors_per_support, _pool_stream(seed, trial), field, max_supports)


def run_ricriv(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    prefix_fields = len(cfg.field_list) == 2
    columns, summary = {}, {"supports": math.comb(cfg.n, cfg.s)}
    names = ("ric_left", "ric_right", "riv_left", "riv_right")
    for field in cfg.field_list:
        def work(trial, field=field):
            return ricriv_realization(cfg.master_seed, trial, cfg.m, cfg.n, cfg.s, cfg.vectors_per_support,
                                      field, cfg.max_supports).as_tuple()

        values = np.array(_map_chunks(work, range(cfg.matrix_trials), cfg.workers))
        prefix = f"{field}_" if prefix_fields else ""
        for j, name in enumerate(names):
            columns[prefix + name] = values[:, j]
            outputs.distribution(prefix + name, values[:, j], cfg.histogram_bins)
        ric_l, ric_r, riv_l, riv_r = values.T
        summary[field] = {
            "riv_right_le_ric_right": float(np.mean(riv_r <= ric_r)),
            "riv_left_le_ric_left": float(np.mean(riv_l <= ric_l)),
            "ecdf_riv_right_majorizes_ric_right": bool(ecdf_majorizes(riv_r, ric_r)),
            "median": {name: float(np.median(values[:, j])) for j, name in enumerate(names)},
        }
    _write_realizations(outputs, cfg.matrix_trials, columns)
    outputs.json("summary.json", summary)
    return summary


def ecdf_majorizes(a, b) -> bool:
    """True if the ECDF of ``a`` is at least that of ``b`` on the merged sample grid."""
    da, db = EmpiricalDistribution(a), EmpiricalDistribution(b)
    grid = np.concatenate([da.samples, db.samples])
    return bool(np.all(da.cdf(grid) >= db.cdf(grid)))


def deltas_realization(seed, trial, m, n, s, total_vectors, field):
    """Empirical ``delta_s`` of one realization over ``total_vectors`` random sparse vectors."""
    Phi = _matrix(_matrix_key(seed, trial), m, n, field)
    est = empirical_delta_s(Phi, s, supports=total_vectors, vectors_per_support=1,
                            rng=_pool_stream(seed, trial), field=field)
    return est.value


def run_deltas(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    columns, summary = {}, {"lower_bound": True, "total_vectors": cfg.total_vectors}
    for field in cfg.field_list:
        def work(trial, field=field):
            return deltas_realization(cfg.master_seed, trial, cfg.m, cfg.n, cfg.s, cfg.total_vectors, field)

        values = np.array(_map_chunks(work, range(cfg.matrix_trials), cfg.workers))
        columns[f"delta_{field}"] = values
        dist = outputs.distribution(f"delta_{field}", values, cfg.histogram_bins)
        summary[field] = {"median": dist.median(), "mean": dist.mean, "max": float(values.max())}
    if len(cfg.field_list) == 2:
        summary["quaternion_median_below_real"] = summary[QUATERNION]["median"] < summary[REAL]["median"]
        summary["quaternion_below_real_fraction"] = float(np.mean(columns["delta_quaternion"] < columns["delta_real"]))
    _write_realizations(outputs, cfg.matrix_trials, columns)
    outputs.json("summary.json", summary)
    return summary


def run_sample_size(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    rows, failures = [], 0
    for delta in cfg.delta_grid:
        for eps in cfg.eps_grid:
            for s in cfg.s_grid:
                for n in cfg.n_grid:
                    try:
                        fixed = sample_size_fixed_support(delta, eps, s)
                        rip = sample_size_rip(delta, eps, s, n)
                        rows.append([delta, eps, s, n, fixed, rip, "ok"])
                    except ParameterError as exc:
                        failures += 1
                        rows.append([delta, eps, s, n, "", "", f"invalid: {exc}"])
    outputs.csv("sample_size.csv", ["delta", "eps", "s", "n", "m_fixed_support", "m_rip", "status"], rows)
    return {"rows": len(rows), "invalid_rows": failures}


def run_verify_mgf(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    rows, ok = [], True
    for m in cfg.m_grid:
        params = GammaParams.quaternion_rayleigh(m)
        rep = verify_mgf_bound(params, cfg.mgf_points)
        ok &= rep.passed
        cert = rep.certificate
        rows.append([m, params.alpha, params.beta, cert.sigma2, cert.delta, rep.max_ratio,
                     rep.argmax_t, "pass" if rep.passed else "fail"])
    outputs.csv("mgf.csv", ["m", "alpha", "beta", "sigma2", "delta", "max_ratio", "argmax_t", "status"], rows)
    return {"passed": bool(ok)}


def run_verify_tail(cfg: ExperimentConfig, outputs: _Outputs) -> dict:
    rows, ok = [], True
    for field in cfg.field_list:
        R = rayleigh_samples(cfg.master_seed, cfg.m, cfg.n, cfg.s, cfg.matrix_trials, field, cfg.workers)[:, 0]
        dev = np.abs(R - 1.0)
        for t in cfg.t_grid:
            freq = float(np.mean(dev >= t))
            if field == QUATERNION:
                bound = tail_bound(cfg.m, t)
            else:
                # the same certificate applied to the real law Gamma(m/2, m/2)
                bound = subexp_tail_bound(subexp_params_for_gamma(GammaParams.real_rayleigh(cfg.m)), t)
            passed = not freq > bound
            ok &= passed
            rows.append([field, t, freq, bound, "pass" if passed else "fail"])
    outputs.csv("tail.csv", ["field", "t", "exceedance", "bound", "status"], rows)
    return {"passed": bool(ok)}


RUNNERS = {
    "rayleigh": run_rayleigh,
    "ricriv": run_ricriv,
    "deltas": run_deltas,
    "sample-size": run_sample_size,
    "verify-mgf": run_verify_mgf,
    "verify-tail": run_verify_tail,
}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run ``cfg`` and write its outputs plus ``manifest.json``.

    Returns the manifest. A failed verification still writes the manifest
    (with ``status = "failed"``) before raising :class:`VerificationError`.
    """
    cfg = cfg.resolved()
    outputs = _Outputs(cfg.out)
    start = time.perf_counter()
    result = RUNNERS[cfg.kind](cfg, outputs)
    duration = time.perf_counter() - start
    failed = cfg.kind in ("verify-mgf", "verify-tail") and not result["passed"]
    manifest = {
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "version": __version__,
        "duration_seconds": duration,
        "status": "failed" if failed else "ok",
        "result": result,
        "checksums": {name: sha256_file(outputs.root / name) for name in outputs.files},
    }
    (outputs.root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    if failed:
        raise VerificationError(f"{cfg.kind} verification failed; see {outputs.root}")
    return manifest

"""Monte-Carlo experiment driver.

Reproduces the subband minimum-measurement table, the noiselet/Haar
sampling experiment (including the direct coarse-block variant), success
phase curves, and spectral-deviation tails, emitting CSV or JSON.

Determinism: every trial is keyed by (config.seed, trial_id) through a
counter-based Philox stream, rows are gathered and sorted by trial_id, and
aggregates are recomputed from rows on load. Output is therefore fixed by
(config, seed) independent of worker count, except for the wall_time_s
column, which is informational only (aggregate CSVs omit it).
"""
from __future__ import annotations

import csv
import io
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from .analysis import coherence, deviation_tail
from .certificate import certify_then_solve
from .sampling import (SparseModel, keyed_generator, random_model, restrict,
                       sample_uniform)
from .solver import (EXACTNESS_THRESHOLD, SolverOptions, basis_pursuit,
                     recover)
from .transforms import (column_restrict, compose, dft, haar, noiselet,
                         subband_system)

__all__ = ["ExperimentConfig", "TrialRow", "ExperimentRecord", "run_trial",
           "run_trials", "find_min_measurements", "table1_experiment",
           "noiselet_haar_experiment", "phase_curve", "certify_experiment",
           "deviation_experiment", "load_record", "DEFAULT_TABLE1_CELLS"]

# populated (j, S) cells of the n=1024 subband experiment
DEFAULT_TABLE1_CELLS = ((1, 50), (1, 25), (1, 15), (2, 25), (2, 15), (2, 8),
                        (3, 15), (3, 8))

TRIAL_CSV_FIELDS = ["trial_id", "seed", "system", "j", "S", "m", "exact",
                    "rel_error_inf", "converged", "strict_certificate",
                    "off_support_max", "wall_time_s"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""
    experiment: str = "phase_curve"
    n: int = 1024
    system: str = "dft"  # dft | subband | noiselet_haar
    wavelet: str = "daub8"
    scales: tuple = (1,)
    sparsities: tuple = (10,)
    m: int | None = None
    m_grid: tuple = ()
    m_search: dict = field(default_factory=dict)  # lo/hi/step/coarse_step
    cells: tuple = ()  # explicit (j, S) pairs for the table experiment
    trials: int = 100
    success_target: float = 1.0
    seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    output_path: str | None = None
    output_format: str = "csv"
    coarse_direct: int | None = None
    dense_coarse: int | None = None
    certify: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (0.0 < self.success_target <= 1.0):
            raise ValueError("success_target must lie in (0, 1]")

    def to_dict(self):
        d = asdict(self)
        d["solver"] = self.solver.to_dict()
        d["scales"] = list(self.scales)
        d["sparsities"] = list(self.sparsities)
        d["m_grid"] = list(self.m_grid)
        d["cells"] = [list(c) for c in self.cells]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "solver" in d and isinstance(d["solver"], dict):
            d["solver"] = SolverOptions.from_dict(d["solver"])
        for key in ("scales", "sparsities", "m_grid"):
            if key in d and d[key] is not None:
                d[key] = tuple(d[key])
        if "cells" in d and d["cells"] is not None:
            d["cells"] = tuple(tuple(c) for c in d["cells"])
        return cls(**d)


@dataclass
class TrialRow:
    trial_id: int
    seed: int
    system: str
    j: int | None
    S: int
    m: int
    exact: bool
    rel_error_inf: float
    converged: bool
    strict_certificate: bool | None = None
    off_support_max: float | None = None
    wall_time_s: float = 0.0

    def to_dict(self):
        return {f: getattr(self, f) for f in TRIAL_CSV_FIELDS}


@dataclass
class ExperimentRecord:
    config: dict
    rows: list
    aggregates: dict

    def to_dict(self):
        return {"config": self.config,
                "rows": [r.to_dict() if isinstance(r, TrialRow) else r
                         for r in self.rows],
                "aggregates": self.aggregates}

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)

    def rows_csv(self, include_wall_time=True):
        fields = TRIAL_CSV_FIELDS if include_wall_time else TRIAL_CSV_FIELDS[:-1]
        buf = io.StringIO()
        w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        w.writerow(fields)
        for r in self.rows:
            d = r.to_dict() if isinstance(r, TrialRow) else r
            w.writerow([_csv_cell(d.get(f)) for f in fields])
        return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, float) and np.isnan(v):
        return "nan"
    return v


def _aggregate(rows):
    n_trials = len(rows)
    successes = sum(1 for r in rows if r.exact)
    return {"n_trials": n_trials, "successes": successes,
            "success_rate": successes / n_trials if n_trials else float("nan")}


@lru_cache(maxsize=32)
def _system(system, n, j, wavelet):
    """Operator cache; operators are immutable so sharing is safe."""
    if system == "dft":
        return dft(n)
    if system == "subband":
        return subband_system(n, j, wavelet).operator
    if system == "noiselet_haar":
        return compose(noiselet(n), haar(n))
    raise ValueError(f"unknown system {system!r}; choose dft, subband, or "
                     f"noiselet_haar")


def _system_label(system, j, wavelet):
    if system == "subband":
        return f"subband(j={j},{wavelet})"
    return system


def trial_seeds(seed, trial_id):
    """Two independent 63-bit sub-seeds (model, omega) for one trial."""
    gen = keyed_generator(seed, trial_id)
    a, b = gen.integers(0, 2**63, size=2)
    return int(a), int(b)


def run_trial(config, trial_id):
    """One draw of (T, z, Omega), measurement, solve, optional certificate."""
    j = config.scales[0] if config.scales else 1
    S = config.sparsities[0]
    m = config.m
    if m is None:
        raise ValueError("config.m must be set for run_trial")
    U = _system(config.system, config.n, j, config.wavelet)
    dim = U.n_cols
    model_seed, omega_seed = trial_seeds(config.seed, trial_id)
    model = random_model(dim, S, model_seed)
    omega = sample_uniform(U.n_rows, m, omega_seed)

    t0 = time.perf_counter()
    strict = None
    off_max = None
    if config.certify:
        out = certify_then_solve(U, omega, model, opts=config.solver)
        res = out["recovery"]
        strict = out["certificate"].strict
        off_max = out["certificate"].off_support_max
    else:
        res = recover(U, omega, model, opts=config.solver)
    wall = time.perf_counter() - t0

    return TrialRow(trial_id=trial_id, seed=model_seed,
                    system=_system_label(config.system, j, config.wavelet),
                    j=j if config.system == "subband" else None,
                    S=S, m=m, exact=bool(res.exact),
                    rel_error_inf=float(res.rel_error_inf),
                    converged=bool(res.converged),
                    strict_certificate=strict, off_support_max=off_max,
                    wall_time_s=wall)


def _trial_worker(payload):
    config_dict, trial_id = payload
    return run_trial(ExperimentConfig.from_dict(config_dict), trial_id)


def run_trials(config, trial_ids, max_failures=None):
    """Run trials (optionally in parallel), sorted by trial_id.

    With max_failures set, stops submitting once more than that many
    non-exact rows have been seen; the rows run so far are returned.
    """
    ids = list(trial_ids)
    rows = []
    if config.workers <= 1:
        for tid in ids:
            rows.append(run_trial(config, tid))
            if max_failures is not None:
                if sum(1 for r in rows if not r.exact) > max_failures:
                    break
    else:
        cfg = config.to_dict()
        chunk = max(1, 4 * config.workers)
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for lo in range(0, len(ids), chunk):
                batch = ids[lo : lo + chunk]
                rows.extend(pool.map(_trial_worker, [(cfg, t) for t in batch]))
                if max_failures is not None:
                    if sum(1 for r in rows if not r.exact) > max_failures:
                        break
    rows.sort(key=lambda r: r.trial_id)
    return rows


def _probe(config, m, j, S):
    """Success-target probe of one (S, j, m) cell with early failure cut-off."""
    cell_cfg = replace(config, m=int(m), scales=(j,), sparsities=(S,))
    allowed = int(np.floor((1.0 - config.success_target) * config.trials))
    rows = run_trials(cell_cfg, range(config.trials), max_failures=allowed)
    failures = sum(1 for r in rows if not r.exact)
    met = failures <= allowed and len(rows) == config.trials
    # short-circuited probes did not run all trials; they failed the target
    successes = sum(1 for r in rows if r.exact)
    return met, successes, rows


def find_min_measurements(config, S, j):
    """Smallest m on the search grid meeting the success target for (S, j).

    Monotone bracketing: expand upward in coarse steps from the starting
    probe until the target is met, then bisect the bracket down to the
    grid step. Every probe outcome is recorded in the trace; by
    construction all recorded failures lie below all recorded successes.
    """
    U = _system(config.system, config.n, j, config.wavelet)
    rows_max = U.n_rows
    search = dict(config.m_search)
    step = int(search.get("step", 1))
    coarse = int(search.get("coarse_step", 4))
    hi_max = int(search.get("hi", rows_max))
    lo_bound = int(search.get("lo", S))  # virtual floor, never probed
    hi_max = min(hi_max, rows_max)

    trace = []
    all_rows = []

    def probe(m):
        met, successes, rows = _probe(config, m, j, S)
        trace.append({"m": int(m), "met": bool(met), "successes": successes,
                      "trials": config.trials})
        all_rows.extend(rows)
        return met

    m0 = min(max(2 * S, lo_bound + step), hi_max)
    lo, hi = lo_bound, None
    m = m0
    while True:
        if probe(m):
            hi = m
            break
        lo = m
        if m >= hi_max:
            return {"S": S, "j": j, "M": None, "censored": True,
                    "trace": trace, "rows": all_rows}
        m = min(m + coarse, hi_max)

    while hi - lo > step:
        mid = lo + ((hi - lo) // (2 * step)) * step
        mid = max(lo + step, min(mid, hi - step))
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return {"S": S, "j": j, "M": int(hi), "censored": False,
            "trace": trace, "rows": all_rows}


def table1_experiment(config):
    """Minimum measurement counts over the configured subband cells."""
    config = replace(config, system="subband")
    if config.cells:
        cells = [tuple(c) for c in config.cells]
    elif config.scales and config.sparsities and (
            len(config.scales) > 1 or len(config.sparsities) > 1):
        cells = [(j, S) for j in config.scales for S in config.sparsities]
    else:
        cells = list(DEFAULT_TABLE1_CELLS)

    results = []
    rows = []
    for (j, S) in cells:
        out = find_min_measurements(config, S, j)
        rows.extend(out.pop("rows"))
        results.append(out)
    for i, r in enumerate(rows):
        r.trial_id = i  # re-key rows across cells for a stable global order
    agg = {"cells": results,
           "censored": any(c["censored"] for c in results)}
    return ExperimentRecord(config=config.to_dict(), rows=rows, aggregates=agg)


def _coarse_model(n, S, b, seed):
    """Sign model with a fully occupied coarse block of size b.

    Directly measured coefficients pay off exactly when they are almost
    always significant, so the coarse-block variant is exercised on
    signals whose first b wavelet coefficients are all nonzero, with the
    remaining S - b signs placed uniformly at random.
    """
    if not 0 < b < n or (b & (b - 1)) != 0:
        raise ValueError(f"coarse block must be a power of 2 in (0, n), got {b}")
    if S < b:
        raise ValueError(f"S={S} must be at least the coarse block size b={b}")
    rest = random_model(n - b, S - b, seed) if S > b else None
    gen = keyed_generator(seed, 0xC0A5)
    support = np.arange(b)
    signs = gen.integers(0, 2, size=b) * 2.0 - 1.0
    if rest is not None:
        support = np.concatenate([support, rest.support + b])
        signs = np.concatenate([signs, rest.signs])
    return SparseModel(n=n, support=support, signs=signs)


def _noiselet_trial(payload):
    n, S, m, seed, tid, coarse_direct, dense_coarse, opts_dict = payload
    opts = SolverOptions.from_dict(opts_dict)
    U = _system("noiselet_haar", n, 1, "haar")
    label = "noiselet_haar" if coarse_direct is None else \
        f"noiselet_haar(coarse={coarse_direct})"
    model_seed, omega_seed = trial_seeds(seed, tid)
    if S == 0:
        model = SparseModel(n, np.array([], dtype=np.intp), np.array([]))
    elif dense_coarse is not None:
        model = _coarse_model(n, S, dense_coarse, model_seed)
    else:
        model = random_model(n, S, model_seed)
    omega = sample_uniform(n, m, omega_seed)

    t0 = time.perf_counter()
    if coarse_direct is None:
        res = recover(U, omega, model, opts=opts)
        exact, rel, conv = bool(res.exact), float(res.rel_error_inf), res.converged
    else:
        b = coarse_direct
        x0 = model.vector()
        A = restrict(U, omega)
        y = A.forward(x0)
        coarse_part = np.zeros(n)
        coarse_part[:b] = x0[:b]
        y_rest = y - A.forward(coarse_part)
        A_rest = column_restrict(A, np.arange(b, n))
        ref = x0[b:]
        res = basis_pursuit(A_rest, y_rest, opts=opts, reference=ref,
                            objective_bound=float(np.abs(ref).sum()))
        x_hat = np.concatenate([x0[:b], res.x_hat])
        rel = float(np.abs(x_hat - x0).max()) / float(np.abs(x0).max())
        exact = rel <= EXACTNESS_THRESHOLD
        conv = res.converged
    wall = time.perf_counter() - t0
    return TrialRow(trial_id=tid, seed=model_seed, system=label, j=None,
                    S=S, m=m, exact=exact, rel_error_inf=rel,
                    converged=bool(conv), wall_time_s=wall)


def noiselet_haar_experiment(n, S, m, trials, seed, coarse_direct=None,
                             dense_coarse=None, opts=None, workers=1):
    """Noiselet measurements of Haar-sparse signals at desk scale (1D).

    Plain mode draws uniform S-sparse sign models and recovers them from
    m random noiselet samples. With coarse_direct=b, the first b wavelet
    coefficients are measured exactly and excluded from the unknowns;
    noiselet sampling and basis pursuit apply to the remainder only.
    dense_coarse=b draws signals whose coarse block is fully occupied
    (defaults to coarse_direct when that is set), which is the regime in
    which direct coarse measurement pays off.

    m counts complex noiselet samples (2m real numbers); the direct
    measurements add b more real numbers in coarse mode.
    """
    if coarse_direct is not None and dense_coarse is None:
        dense_coarse = coarse_direct
    opts = opts or SolverOptions()
    U = _system("noiselet_haar", n, 1, "haar")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # subsample fallback beyond n=4096
        mu = coherence(U)

    payloads = [(n, S, m, seed, tid, coarse_direct, dense_coarse, opts.to_dict())
                for tid in range(trials)]
    if workers <= 1:
        rows = [_noiselet_trial(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_noiselet_trial, payloads))
    rows.sort(key=lambda r: r.trial_id)

    agg = _aggregate(rows)
    agg["mu"] = mu
    agg["direct_measurements"] = int(coarse_direct) if coarse_direct else 0
    agg["real_numbers_recorded"] = 2 * m + (coarse_direct or 0)
    cfg = {"experiment": "noiselet_haar", "n": n, "S": S, "m": m,
           "trials": trials, "seed": seed, "coarse_direct": coarse_direct,
           "dense_coarse": dense_coarse, "solver": opts.to_dict()}
    return ExperimentRecord(config=cfg, rows=rows, aggregates=agg)


def phase_curve(config):
    """Success rate for every (S, m) cell of the configured grid."""
    if not config.m_grid:
        raise ValueError("phase_curve requires a nonempty m_grid")
    j = config.scales[0] if config.scales else 1
    cells = []
    rows = []
    rid = 0
    for S in config.sparsities:
        for m in config.m_grid:
            cell_cfg = replace(config, m=int(m), scales=(j,), sparsities=(int(S),))
            cell_rows = run_trials(cell_cfg, range(config.trials))
            for r in cell_rows:
                r.trial_id = rid
                rid += 1
            rows.extend(cell_rows)
            agg = _aggregate(cell_rows)
            cells.append({"system": _system_label(config.system, j, config.wavelet),
                          "j": j, "S": int(S), "m": int(m),
                          "trials": agg["n_trials"], "successes": agg["successes"],
                          "success_rate": agg["success_rate"]})
    return ExperimentRecord(config=config.to_dict(), rows=rows,
                            aggregates={"cells": cells})


def phase_csv(record):
    """Aggregate-level CSV of a phase_curve record (no wall-time column)."""
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    w.writerow(["system", "j", "S", "m", "trials", "successes", "success_rate"])
    for c in record.aggregates["cells"]:
        w.writerow([c["system"], c["j"], c["S"], c["m"], c["trials"],
                    c["successes"], repr(c["success_rate"])])
    return buf.getvalue()


def certify_experiment(config):
    """Certificate/solver consistency over seeded random instances."""
    cfg = replace(config, certify=True)
    rows = run_trials(cfg, range(config.trials))
    agg = _aggregate(rows)
    strict_rows = [r for r in rows if r.strict_certificate]
    agg["strict_instances"] = len(strict_rows)
    agg["strict_and_exact"] = sum(1 for r in strict_rows if r.exact)
    agg["consistent"] = all(r.exact for r in strict_rows)
    return ExperimentRecord(config=cfg.to_dict(), rows=rows, aggregates=agg)


def deviation_experiment(config):
    """Monte-Carlo tail frequency of {Gram deviation >= 1/2} (Bernoulli model)."""
    j = config.scales[0] if config.scales else 1
    U = _system(config.system, config.n, j, config.wavelet)
    S = config.sparsities[0]
    if config.m is None:
        raise ValueError("config.m must be set for deviation_tail")
    model_seed, _ = trial_seeds(config.seed, 0)
    model = random_model(U.n_cols, S, model_seed)
    freq = deviation_tail(U, model.support, config.m, config.trials, config.seed)
    agg = {"frequency": freq, "threshold": 0.5, "trials": config.trials,
           "support": model.support.tolist(), "m": config.m}
    return ExperimentRecord(config=config.to_dict(), rows=[], aggregates=agg)


def load_record(path):
    """Load a JSON record and re-derive its aggregate success counts.

    Raises ValueError when stored aggregates disagree with the rows.
    """
    with open(path) as fh:
        d = json.load(fh)
    rows = d.get("rows", [])
    agg = d.get("aggregates", {})
    if rows and "success_rate" in agg:
        succ = sum(1 for r in rows if r.get("exact"))
        if agg.get("successes") != succ or agg.get("n_trials") != len(rows):
            raise ValueError("aggregates disagree with per-trial rows")
        rate = succ / len(rows)
        if abs(rate - agg["success_rate"]) > 1e-12:
            raise ValueError("aggregates disagree with per-trial rows")
    return d

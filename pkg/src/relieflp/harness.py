"""Seeded instance generators and the LP-versus-branch-and-bound benchmark.

The generated data are stand-ins: uniform points in the unit square for
location problems and small integer supplies/demands for allocation.  They
do not reproduce any published cost values.
"""

from __future__ import annotations

import json
import logging
import statistics
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .bnb import BnbOptions, solve_bnb
from .errors import ReliefLPError
from .lp import SolverOptions, Status, check_integrality, solve_simplex
from .models import (KMedoidInstance, NonExpendableInstance, TransportInstance, build_model,
                     integer_vars)

log = logging.getLogger(__name__)

TABLE1_SIZES = (20, 40, 60, 80, 100, 120, 140, 160, 180, 200, 400, 600, 800)
TABLE1_KS = (10, 5)
NON_REPRODUCING_NOTE = ("synthetic unit-square instances; trend comparison only, "
                        "cost values are not comparable with any published table")


def gen_kmedoid_instance(n: int, seed: int, k: int = 1) -> KMedoidInstance:
    """``n`` uniform points in the unit square, Euclidean distances."""
    if n < 2:
        raise ValueError("n must be at least 2")
    pts = np.random.default_rng(seed).random((n, 2))
    return KMedoidInstance.from_points(pts, k)


def gen_transport_instance(m: int, n: int, seed: int, max_units: int = 5) -> TransportInstance:
    """Integer supplies/demands in ``[0, max_units]`` with total supply covering total demand.

    When the raw draw is short, demands are scaled down (floored) to fit.
    """
    rng = np.random.default_rng(seed)
    s = rng.integers(0, max_units + 1, size=m)
    d = rng.integers(0, max_units + 1, size=n)
    if s.sum() < d.sum():
        d = np.floor(d * (s.sum() / d.sum())).astype(np.int64)
    costs = 1.0 - rng.random((m, n))
    return TransportInstance(s, d, costs)


def gen_nonexpendable_instance(m: int, n: int, seed: int, max_units: int = 5) -> NonExpendableInstance:
    """Like :func:`gen_transport_instance`, with each demand capped by total capacity."""
    rng = np.random.default_rng(seed)
    s = rng.integers(0, max_units + 1, size=m)
    d = np.minimum(rng.integers(0, max_units + 1, size=n), s.sum())
    costs = 1.0 - rng.random((m, n))
    return NonExpendableInstance(s, d, costs)


@dataclass
class BenchRecord:
    model: str
    n: int
    m: int | None
    k: int | None
    seed: int
    objective: float | None = None
    lp_time: float | None = None
    bnb_time: float | None = None
    lp_integral: bool | None = None
    bnb_nodes: int | None = None
    objectives_agree: bool | None = None
    engine: str = "highs"
    error: str | None = None


@dataclass(frozen=True)
class BenchConfig:
    """Grid of benchmark cells.

    For ``model="kmedoid"`` every ``(n, k, seed)`` combination in ``sizes x
    ks x seeds`` is a cell; for the transport models ``sizes`` holds ``(m,
    n)`` pairs and ``ks`` is ignored.
    """

    model: str = "kmedoid"
    sizes: tuple = TABLE1_SIZES
    ks: tuple = TABLE1_KS
    seeds: tuple = (0,)
    repetitions: int = 3
    engine: str = "highs"
    max_units: int = 5
    bnb_max_nodes: int = 10_000
    agree_tol: float = 1e-6


def table1_config(seed: int = 0, repetitions: int = 3, engine: str = "highs") -> BenchConfig:
    return BenchConfig("kmedoid", TABLE1_SIZES, TABLE1_KS, (seed,), repetitions, engine)


def _cells(cfg: BenchConfig):
    for size in cfg.sizes:
        for seed in cfg.seeds:
            if cfg.model == "kmedoid":
                for k in cfg.ks:
                    yield size, k, seed
            else:
                yield size, None, seed


def _instance(cfg, size, k, seed):
    if cfg.model == "kmedoid":
        return gen_kmedoid_instance(int(size), seed, int(k))
    m, n = size
    if cfg.model == "expendable":
        return gen_transport_instance(m, n, seed, cfg.max_units)
    if cfg.model == "non_expendable":
        return gen_nonexpendable_instance(m, n, seed, cfg.max_units)
    raise ValueError(f"unknown model {cfg.model!r}")


def run_cell(cfg: BenchConfig, size, k, seed) -> BenchRecord:
    if cfg.model == "kmedoid":
        rec = BenchRecord(cfg.model, int(size), None, int(k), seed, engine=cfg.engine)
    else:
        rec = BenchRecord(cfg.model, int(size[1]), int(size[0]), None, seed, engine=cfg.engine)
    try:
        inst = _instance(cfg, size, k, seed)
        problem = build_model(inst)
        ivars = integer_vars(inst)
        lp_opts = SolverOptions(engine=cfg.engine)
        bnb_opts = BnbOptions(max_nodes=cfg.bnb_max_nodes, lp=lp_opts)
        lp_times, bnb_times = [], []
        for _ in range(cfg.repetitions):
            t0 = time.perf_counter()
            lp = solve_simplex(problem, lp_opts)
            lp_times.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            ip = solve_bnb(problem, ivars, bnb_opts)
            bnb_times.append(time.perf_counter() - t0)
        rec.lp_time = statistics.median(lp_times)
        rec.bnb_time = statistics.median(bnb_times)
        rec.bnb_nodes = ip.nodes_explored
        if lp.status is not Status.OPTIMAL or ip.status is not Status.OPTIMAL:
            rec.error = f"lp status {lp.status.value}, bnb status {ip.status.value}"
            return rec
        rec.objective = ip.objective
        rec.lp_integral = check_integrality(lp.point).is_integral
        rec.objectives_agree = abs(lp.objective - ip.objective) <= cfg.agree_tol * max(1.0, abs(ip.objective))
    except (ReliefLPError, ValueError) as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        log.warning("cell %s k=%s seed=%s failed: %s", size, k, seed, rec.error)
    return rec


def run_benchmark(cfg: BenchConfig, progress=None) -> list:
    """Run every cell; solver failures are recorded on the cell, not raised."""
    records = []
    for size, k, seed in _cells(cfg):
        rec = run_cell(cfg, size, k, seed)
        records.append(rec)
        if progress is not None:
            progress(rec)
    records.sort(key=lambda r: (r.model, r.n, r.m or 0, -(r.k or 0), r.seed))
    return records


def format_table(records) -> str:
    """Fixed-width text table in the layout of the relief-centre experiments."""
    head = f"{'points':>7} {'k':>3} {'cost':>14} {'time LP (s)':>12} {'time IP (s)':>12} {'integral':>9} {'nodes':>6}"
    lines = [head, "-" * len(head)]
    for r in records:
        size = r.n if r.m is None else f"{r.m}x{r.n}"
        if r.error:
            lines.append(f"{size!s:>7} {r.k if r.k is not None else '-':>3} error: {r.error}")
            continue
        lines.append(f"{size!s:>7} {r.k if r.k is not None else '-':>3} {r.objective:>14.7f} "
                     f"{r.lp_time:>12.3f} {r.bnb_time:>12.3f} {str(r.lp_integral):>9} {r.bnb_nodes:>6}")
    lines.append(f"note: {NON_REPRODUCING_NOTE}")
    return "\n".join(lines)


def records_to_json(records, cfg: BenchConfig | None = None) -> str:
    payload = {"note": NON_REPRODUCING_NOTE,
               "config": None if cfg is None else asdict(cfg),
               "records": [asdict(r) for r in records]}
    return json.dumps(payload, indent=2)


def records_from_json(text: str) -> list:
    return [BenchRecord(**r) for r in json.loads(text)["records"]]


def trend_holds(records, min_n: int = 200) -> bool:
    """LP strictly faster than branch and bound on every large k-medoid row."""
    rows = [r for r in records if r.model == "kmedoid" and r.n >= min_n]
    return bool(rows) and all(r.error is None and r.lp_time < r.bnb_time for r in rows)


@dataclass
class BenchSummary:
    rows: int
    errors: int
    all_agree: bool
    all_integral: bool
    trend: bool
    median_lp: float = field(default=float("nan"))
    median_bnb: float = field(default=float("nan"))


def summarize(records, min_n: int = 200) -> BenchSummary:
    ok = [r for r in records if r.error is None]
    big = [r for r in ok if r.model == "kmedoid" and r.n >= min_n]
    return BenchSummary(
        rows=len(records), errors=len(records) - len(ok),
        all_agree=all(r.objectives_agree for r in ok),
        all_integral=all(r.lp_integral for r in ok),
        trend=trend_holds(records, min_n),
        median_lp=statistics.median(r.lp_time for r in big) if big else float("nan"),
        median_bnb=statistics.median(r.bnb_time for r in big) if big else float("nan"))

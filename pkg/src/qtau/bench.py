"""Weight-sweep benchmark: Q^Mac construction cold and warm, and lambda-sum
assembly per weight level."""

from __future__ import annotations

import gc
import json
import tempfile
import time
from pathlib import Path

from gmpy2 import mpq

from .cache import CacheStore
from .errors import UsageError
from .partitions import enumerate_strict
from .polyring import OddPolynomial
from .qschur import QMacTable, build_levels, reset_row_caches
from .scalars import Root2Number

__all__ = ["run_bench", "bench_body", "TIMING_KEYS"]

TIMING_KEYS = ("cold_seconds", "warm_seconds", "assembly_seconds", "speedup", "seconds")


def _timed_levels(table: QMacTable, max_weight: int, workers: int) -> dict[int, float]:
    # garbage collection off while timing, as timeit does
    out = {}
    gc.collect()
    gc.disable()
    try:
        mark = [time.perf_counter()]

        def on_level(w, _level):
            now = time.perf_counter()
            out[w] = now - mark[0]
            mark[0] = now

        build_levels(table, max_weight, workers, on_level)
    finally:
        gc.enable()
    return out


def _assemble_level(table: QMacTable, w: int) -> OddPolynomial:
    # BGW Q-expansion weight-w component, scalar from the hook values
    from .partitions import double_partition, hook_eval_delta1
    from .qschur import mm_factor

    acc = OddPolynomial.zero(w)
    for lam in enumerate_strict(w):
        d1 = hook_eval_delta1(lam)
        d2 = hook_eval_delta1(double_partition(lam))
        c = mpq(1, 16**w) * Root2Number.coerce(mm_factor(lam.length)) * d1**3 / d2**2
        acc = acc + table.get(lam) * c.a
    return acc


def _cold_run(root: Path, max_weight: int, threads: int, rep: int):
    directory = root / f"cold-{rep}"
    reset_row_caches()
    table = QMacTable(CacheStore(directory))
    levels = _timed_levels(table, max_weight, threads)
    return sum(levels.values()), levels, table.pfaffian_evaluations, directory


def _warm_run(directory: Path, max_weight: int):
    store = CacheStore(directory)
    table = QMacTable(store)
    levels = _timed_levels(table, max_weight, 1)
    return sum(levels.values()), levels, table, store


def run_bench(max_weight: int = 16, min_weight: int = 4, threads: int = 1, cache_dir=None,
              repeats: int = 3) -> dict:
    """Cold builds into empty stores, then warm rebuilds from a filled store
    with a fresh memo.  Each phase is repeated and the fastest run kept.
    Returns a JSON-ready dict."""
    if min_weight < 0 or max_weight < min_weight:
        raise UsageError("need 0 <= min_weight <= max_weight")
    if max_weight > 255:
        raise UsageError("weights above 255 are not representable")
    if threads < 1 or repeats < 1:
        raise UsageError("threads and repeats must be >= 1")
    if cache_dir is not None:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix="qtau-bench-", dir=cache_dir) as tmp:
        root = Path(tmp)
        colds = [_cold_run(root, max_weight, threads, r) for r in range(repeats)]
        cold_total = min(c[0] for c in colds)
        cold_times = {w: min(c[1][w] for c in colds) for w in colds[0][1]}
        cold_evaluations = colds[-1][2]
        warm_total, warm_times, warm, warm_store = None, {}, None, None
        for _ in range(repeats):
            warm = warm_store = None  # drop the previous table before timing
            total, times, warm, warm_store = _warm_run(colds[-1][3], max_weight)
            warm_total = total if warm_total is None else min(warm_total, total)
            warm_times = {w: min(t, warm_times.get(w, t)) for w, t in times.items()}

        levels = []
        for w in range(min_weight, max_weight + 1):
            parts = enumerate_strict(w)
            t0 = time.perf_counter()
            component = _assemble_level(warm, w)
            assembly = time.perf_counter() - t0
            levels.append({
                "weight": w,
                "partitions": len(parts),
                "terms": sum(len(warm.get(lam)) for lam in parts),
                "max_terms": max((len(warm.get(lam)) for lam in parts), default=0),
                "assembled_terms": len(component),
                "cold_seconds": round(cold_times.get(w, 0.0), 6),
                "warm_seconds": round(warm_times.get(w, 0.0), 6),
                "assembly_seconds": round(assembly, 6),
            })
        return {
            "campaign": "bench",
            "parameters": {"min_weight": min_weight, "max_weight": max_weight},
            "levels": levels,
            "totals": {
                "partitions": sum(len(enumerate_strict(w)) for w in range(max_weight + 1)),
                "cold_pfaffian_evaluations": cold_evaluations,
                "warm_pfaffian_evaluations": warm.pfaffian_evaluations,
                "warm_cache_hits": warm_store.hits,
                "cold_seconds": round(cold_total, 6),
                "warm_seconds": round(warm_total, 6),
                "speedup": round(cold_total / warm_total, 3) if warm_total > 0 else None,
            },
            "threads": threads,
            "repeats": repeats,
        }


def bench_body(report: dict) -> str:
    """Canonical JSON of a bench report with timing and thread count removed."""

    def strip(obj):
        if isinstance(obj, dict):
            return {k: strip(v) for k, v in obj.items() if k not in TIMING_KEYS and k not in ("threads", "repeats")}
        if isinstance(obj, list):
            return [strip(v) for v in obj]
        return obj

    return json.dumps(strip(report), sort_keys=True)

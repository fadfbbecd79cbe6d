"""Computation-time profile of the depth of one matrix with respect to a sample."""

from __future__ import annotations

import time

import numpy as np
import pandas as pd

from src.depth.functions import depth
from src.geometry.hermitian import HpdMatrix
from src.sampling.generators import sample_lognormal
from src.schema.models import DepthMethod

MIN_REPETITIONS = 20
TIMING_COLUMNS = ["method", "d", "n", "median_ms", "repetitions"]


def zonoid_feasible(d: int, n: int) -> bool:
    return d * d < n


def time_call(fn, repetitions: int) -> float:
    """Median wall time of fn() in milliseconds."""
    times = []
    for _ in range(repetitions):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return float(np.median(times) * 1e3)


def timing_profile(d_list, n_list, method_list=(DepthMethod.ZONOID, DepthMethod.GDD),
                   seed: int = 1, repetitions: int = MIN_REPETITIONS) -> pd.DataFrame:
    """Median milliseconds per depth evaluation for every (method, d, n) cell.

    Runs on one thread.  Zonoid cells with d^2 >= n are left out.
    """
    repetitions = max(int(repetitions), MIN_REPETITIONS)
    rows = []
    for d in d_list:
        identity = HpdMatrix.identity(d)
        for n in n_list:
            sample = sample_lognormal(identity, np.sqrt(0.5), n, seed, stream=(d, n))
            query = sample_lognormal(identity, np.sqrt(0.5), 1, seed, stream=(d, n, 1))[0]
            for method in map(DepthMethod, method_list):
                if method.integrated:
                    continue
                if method is DepthMethod.ZONOID and not zonoid_feasible(d, n):
                    continue
                ms = time_call(lambda: depth(sample, query, method), repetitions)
                rows.append({"method": method.value, "d": d, "n": n,
                             "median_ms": ms, "repetitions": repetitions})
    return pd.DataFrame(rows, columns=TIMING_COLUMNS)

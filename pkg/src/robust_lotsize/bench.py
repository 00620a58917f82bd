"""Timing of the compiled kernels against the numpy fallback."""
from __future__ import annotations

import time

import numpy as np

from . import kernels
from .adv_continuous import adv_general_bb, adv_nonoverlap_dp
from .adv_discrete import adv_general_dp
from .oracle import random_instance, random_plan


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads(seed=0):
    """Named callables covering each kernel: layered-graph DP, budget DAG DP and LP-heavy branch and bound."""
    rng = np.random.default_rng(seed)
    d_inst = random_instance(rng, 30, budget="discrete", overlap=True, gamma=30)
    d_plan = random_plan(rng, d_inst)
    c_inst = random_instance(rng, 50, budget="continuous", gamma=200, max_step=120)
    c_plan = random_plan(rng, c_inst)
    b_inst = random_instance(rng, 7, budget="continuous", overlap=True, integral=False)
    b_plan = random_plan(rng, b_inst)
    return {
        "rlp_dp (T=30, overlapping)": lambda: adv_general_dp(d_plan, d_inst).value,
        "dag_dp (T=50, budget 200)": lambda: adv_nonoverlap_dp(c_plan, c_inst).value,
        "simplex via branch and bound (T=7)": lambda: adv_general_bb(b_plan, b_inst).value,
    }


def run(repeat=3, seed=0):
    """Time every workload on every available backend; returns a list of rows."""
    rows = []
    previous = kernels.BACKEND
    try:
        for name, fn in workloads(seed).items():
            row = {"workload": name}
            for backend in kernels.available_backends():
                kernels.use_backend(backend)
                secs, value = _time(fn, repeat)
                row[backend] = {"seconds": secs, "value": value}
            if "cython" in row:
                row["speedup"] = row["python"]["seconds"] / max(row["cython"]["seconds"], 1e-12)
                row["agree"] = abs(row["python"]["value"] - row["cython"]["value"]) <= 1e-6 * (1 + abs(row["python"]["value"]))
            rows.append(row)
    finally:
        kernels.use_backend(previous)
    return rows

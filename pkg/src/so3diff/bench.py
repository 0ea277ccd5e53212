"""Timing and accuracy of the three ways to get dR/dv."""

import time
from dataclasses import dataclass

import numpy as np

from .core import exp_rodrigues, vec
from .jacobians import drot_classical, drot_compact, fd_drot, fd_jacobian_extrapolated, jacobian_vec
from .properties import random_rotvec

FORMULAS = {
    "compact": drot_compact,
    "classical": drot_classical,
    "finite-diff": fd_drot,
}

CSV_HEADER = "formula,band_lo,band_hi,trials,mean_ns_per_eval,max_abs_err"


@dataclass
class BenchRecord:
    formula: str
    band_lo: float
    band_hi: float
    trials: int
    mean_ns_per_eval: float
    max_abs_err: float

    def csv_row(self):
        return (f"{self.formula},{self.band_lo!r},{self.band_hi!r},{self.trials},"
                f"{self.mean_ns_per_eval:.1f},{self.max_abs_err:.17g}")

    def to_dict(self):
        return {
            "formula": self.formula,
            "theta_band": [self.band_lo, self.band_hi],
            "trials": self.trials,
            "mean_ns_per_eval": self.mean_ns_per_eval,
            "max_abs_err_vs_oracle": self.max_abs_err,
        }


def oracle_drot(v, h=1e-3):
    """dR/dv from Richardson-extrapolated central differences, as 9x3."""
    return fd_jacobian_extrapolated(lambda x: vec(exp_rodrigues(x)), v, h)


def run_bench(bands, trials, seed=0):
    """One :class:`BenchRecord` per (band, formula)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    records = []
    for k, (lo, hi) in enumerate(bands):
        if not 0.0 < lo < hi < np.pi:
            raise ValueError(f"band ({lo}, {hi}) must lie inside (0, pi)")
        rng = np.random.default_rng([seed, k])
        vs = [random_rotvec(rng, lo, hi) for _ in range(trials)]
        oracles = [oracle_drot(v) for v in vs]
        for name, fn in FORMULAS.items():
            for v in vs:  # warm-up
                fn(v)
            start = time.perf_counter_ns()
            outs = [fn(v) for v in vs]
            elapsed = time.perf_counter_ns() - start
            err = max(float(np.abs(jacobian_vec(D) - o).max()) for D, o in zip(outs, oracles))
            records.append(BenchRecord(name, float(lo), float(hi), trials,
                                       elapsed / trials, err))
    return records

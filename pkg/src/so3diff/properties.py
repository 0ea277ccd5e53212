"""Randomized property suite: every kernel invariant as a max-residual sweep.

Each property draws its own inputs from the generator it is handed and
returns the worst residual seen. The same suite backs ``so3diff check``.
"""

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import core
from .core import exp_rodrigues, exp_rodrigues_outer, exp_series, hat, log
from .jacobians import (
    default_step,
    dpoint_classical,
    dpoint_compact,
    drot_classical,
    drot_compact,
    fd_dpoint,
    fd_drot,
    generators,
)
from .solver import renormalize

_E = np.eye(3)


def random_unit(rng):
    x = rng.normal(size=3)
    return x / np.linalg.norm(x)


def random_rotvec(rng, lo=0.0, hi=math.pi):
    """Uniform direction, angle uniform in ``[lo, hi]``."""
    return rng.uniform(lo, hi) * random_unit(rng)


def _identity_property(name):
    def prop(rng):
        a, b, c = rng.uniform(-10.0, 10.0, size=(3, 3))
        G = rng.uniform(-10.0, 10.0, size=(3, 3))
        for r in core.identity_catalog_check(a, b, c, G):
            if r.name == name:
                # skipped (singular G) counts as zero residual
                return 0.0 if r.skipped else r.relative
    return prop


def _hat_antisymmetry(rng):
    a, b = rng.uniform(-10.0, 10.0, size=(2, 3))
    return float(np.linalg.norm(hat(a) @ b + hat(b) @ a))


def _exp_orthogonality(rng):
    R = exp_rodrigues(random_rotvec(rng))
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def _exp_determinant(rng):
    return abs(float(np.linalg.det(exp_rodrigues(random_rotvec(rng)))) - 1.0)


def _log_roundtrip(rng):
    v = random_rotvec(rng, 0.0, math.pi - 1e-6)
    return float(np.linalg.norm(log(exp_rodrigues(v)) - v)) / max(1.0, float(np.linalg.norm(v)))


def _exp_vs_series(rng):
    v = random_rotvec(rng)
    return float(np.linalg.norm(exp_rodrigues(v) - exp_series(v, 30)))


def _exp_vs_outer(rng):
    v = random_rotvec(rng)
    return float(np.linalg.norm(exp_rodrigues(v) - exp_rodrigues_outer(v)))


def _drot_agreement(rng):
    v = random_rotvec(rng, 1e-3, math.pi - 1e-3)
    return float(np.abs(drot_compact(v) - drot_classical(v)).max())


def _dpoint_agreement(rng):
    v = random_rotvec(rng, 1e-3, math.pi - 1e-3)
    u = random_unit(rng)
    return float(np.abs(dpoint_compact(v, u) - dpoint_classical(v, u)).max())


def _fd_compact(rng):
    v = random_rotvec(rng)
    u = random_unit(rng)
    return max(float(np.abs(fd_dpoint(v, u, 1e-5) - dpoint_compact(v, u)).max()),
               float(np.abs(fd_drot(v, 1e-5) - drot_compact(v)).max()))


def _fd_classical(rng):
    v = random_rotvec(rng)
    u = random_unit(rng)
    return max(float(np.abs(fd_dpoint(v, u, 1e-5) - dpoint_classical(v, u)).max()),
               float(np.abs(fd_drot(v, 1e-5) - drot_classical(v)).max()))


def _identity_limit(rng):
    # ||D_i(t n) - G_i||_F / t, must stay below 10
    n = random_unit(rng)
    G = generators()
    worst = 0.0
    for t in (1e-3, 1e-5):
        D = drot_compact(t * n)
        worst = max(worst, max(float(np.linalg.norm(D[i] - G[i])) / t for i in range(3)))
    return worst


def _orthogonality_differential(rng):
    v = random_rotvec(rng)
    R = exp_rodrigues(v)
    D = drot_compact(v)
    return max(float(np.linalg.norm(D[i].T @ R + R.T @ D[i])) for i in range(3))


def _operator_consistency(rng):
    v = random_rotvec(rng)
    u = rng.normal(size=3)
    D = drot_compact(v)
    J = dpoint_compact(v, u)
    return max(float(np.linalg.norm(D[i] @ u - J[:, i])) for i in range(3))


def _parallel_perturbation(rng):
    v = random_rotvec(rng, 1e-3, math.pi)
    u = rng.normal(size=3)
    n = v / np.linalg.norm(v)
    R = exp_rodrigues(v)
    lhs = dpoint_compact(v, u) @ n + R @ np.cross(u, n)
    return float(np.linalg.norm(lhs)) / max(1.0, float(np.linalg.norm(u)))


def _equivariance(rng):
    v = random_rotvec(rng, 1e-3, math.pi)
    u = rng.normal(size=3)
    n = v / np.linalg.norm(v)
    R = exp_rodrigues(v)
    return float(np.linalg.norm(R @ np.cross(u, n) - np.cross(R @ u, n)))


def _linearity(rng):
    v = random_rotvec(rng)
    u1, u2 = rng.normal(size=(2, 3))
    a, b = rng.normal(size=2)
    lhs = dpoint_compact(v, a * u1 + b * u2)
    rhs = a * dpoint_compact(v, u1) + b * dpoint_compact(v, u2)
    return float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(rhs)))


def _wrap(rng):
    v = rng.uniform(math.pi, 3.0 * math.pi) * random_unit(rng)
    return float(np.linalg.norm(exp_rodrigues(renormalize(v)) - exp_rodrigues(v)))


def _solver_gradient(rng):
    # relative error of J^T r against central differences of 0.5 ||r||^2
    from .solver import residual_and_jacobian, synthesize

    v_true = random_rotvec(rng)
    c = synthesize(10, v_true, 0.05, int(rng.integers(2**31)))
    v = random_rotvec(rng)
    r, J = residual_and_jacobian(c, v)
    g = J.T @ r

    def cost(x):
        R = exp_rodrigues(x)
        d = c.sources @ R.T - c.targets
        return 0.5 * float(np.sum(d * d))

    h = default_step(v)
    g_fd = np.array([(cost(v + h * e) - cost(v - h * e)) / (2.0 * h) for e in _E])
    return float(np.linalg.norm(g - g_fd)) / max(1e-12, float(np.linalg.norm(g_fd)))


PROPERTIES = [(f"identity_{name}", _identity_property(name), 1e-12)
              for name in core.IDENTITY_NAMES]
PROPERTIES += [
    ("hat_antisymmetry", _hat_antisymmetry, 1e-12),
    ("exp_orthogonality", _exp_orthogonality, 1e-13),
    ("exp_determinant", _exp_determinant, 1e-12),
    ("log_roundtrip", _log_roundtrip, 1e-10),
    ("exp_vs_series", _exp_vs_series, 1e-12),
    ("exp_vs_outer_form", _exp_vs_outer, 1e-14),
    ("drot_agreement", _drot_agreement, 1e-12),
    ("dpoint_agreement", _dpoint_agreement, 1e-12),
    ("fd_oracle_compact", _fd_compact, 1e-8),
    ("fd_oracle_classical", _fd_classical, 1e-8),
    ("identity_limit", _identity_limit, 10.0),
    ("orthogonality_differential", _orthogonality_differential, 1e-11),
    ("operator_consistency", _operator_consistency, 1e-12),
    ("parallel_perturbation", _parallel_perturbation, 1e-12),
    ("axis_equivariance", _equivariance, 1e-12),
    ("point_jacobian_linearity", _linearity, 1e-12),
    ("wrap_preserves_rotation", _wrap, 1e-12),
    ("solver_gradient", _solver_gradient, 1e-6),
]


def _run_share(args):
    seed_seq, trials = args
    # one independent stream per property so adding a property does not
    # perturb the others
    streams = seed_seq.spawn(len(PROPERTIES))
    out = []
    for (name, prop, _), ss in zip(PROPERTIES, streams):
        rng = np.random.default_rng(ss)
        worst = 0.0
        for _ in range(trials):
            worst = max(worst, prop(rng))
        out.append(worst)
    return out


def run_suite(trials, seed=0, jobs=1):
    """Run every property ``trials`` times; return ``[(name, trials, max, tol, passed)]``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = max(1, min(int(jobs), trials))
    children = np.random.SeedSequence(seed).spawn(jobs)
    shares = [trials // jobs + (1 if k < trials % jobs else 0) for k in range(jobs)]
    work = list(zip(children, shares))
    if jobs == 1:
        results = [_run_share(work[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_share, work))
    worst = np.max(np.array(results), axis=0)
    return [(name, trials, float(w), tol, bool(w <= tol))
            for (name, _, tol), w in zip(PROPERTIES, worst)]

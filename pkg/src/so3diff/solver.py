"""Rotation fitting from point correspondences in exponential coordinates.

Minimizes ``0.5 * sum_i ||R(v) u_i - y_i||^2`` over the rotation vector ``v``
with damped Gauss-Newton (default) or Armijo gradient descent, keeping the
iterate inside the ball ``|v| <= pi``.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import as_vector3, exp_rodrigues, log
from .jacobians import dpoint_compact


class DegenerateGeometry(ValueError):
    pass


class SingularNormalEquations(ArithmeticError):
    pass


def _centered_rank(sources, rtol=1e-9):
    centered = sources - sources.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


@dataclass
class CorrespondenceSet:
    """Paired source/target points, ``targets[i] ~ R sources[i]``."""

    sources: np.ndarray
    targets: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        self.sources = np.asarray(self.sources, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.sources.ndim != 2 or self.sources.shape[1] != 3:
            raise ValueError("sources must have shape (N, 3)")
        if self.targets.shape != self.sources.shape:
            raise ValueError("sources and targets must have the same shape")
        if len(self.sources) < 3:
            raise ValueError("at least 3 correspondences are required")
        if not (np.all(np.isfinite(self.sources)) and np.all(np.isfinite(self.targets))):
            raise ValueError("points must be finite")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if _centered_rank(self.sources) < 2:
            raise DegenerateGeometry("source points are collinear")

    def __len__(self):
        return len(self.sources)

    def to_json(self):
        return json.dumps({"sources": self.sources.tolist(),
                           "targets": self.targets.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if not isinstance(data, dict) or "sources" not in data or "targets" not in data:
            raise ValueError('expected an object with "sources" and "targets"')
        return cls(data["sources"], data["targets"], float(data.get("noise_sigma", 0.0)))


def synthesize(n, v_true, noise_sigma=0.0, seed=0, max_attempts=100):
    """Random correspondences: sources uniform in [-1, 1]^3, targets rotated plus noise."""
    if n < 3:
        raise ValueError("n must be at least 3")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    R = exp_rodrigues(v_true)
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        sources = rng.uniform(-1.0, 1.0, size=(n, 3))
        if _centered_rank(sources) < 2:
            continue
        targets = sources @ R.T
        if noise_sigma > 0:
            targets = targets + rng.normal(0.0, noise_sigma, size=targets.shape)
        return CorrespondenceSet(sources, targets, float(noise_sigma))
    raise DegenerateGeometry(f"no non-collinear sample in {max_attempts} attempts")


def residual_and_jacobian(c, v):
    """Stacked residual ``R(v) u_i - y_i`` (3N,) and its Jacobian (3N, 3)."""
    v = as_vector3(v)
    R = exp_rodrigues(v)
    r = (c.sources @ R.T - c.targets).ravel()
    J = np.vstack([dpoint_compact(v, u, R) for u in c.sources])
    return r, J


def renormalize(v):
    """Map ``v`` into ``|v| <= pi`` without changing the rotation it encodes."""
    v = np.asarray(v, dtype=float)
    theta = float(np.linalg.norm(v))
    if theta <= math.pi:
        return v
    # exp is 2*pi periodic along the axis
    theta_mod = math.fmod(theta, 2.0 * math.pi)
    v = v * (theta_mod / theta)
    if theta_mod > math.pi:
        v = v * (1.0 - 2.0 * math.pi / theta_mod)
    return v


def rotation_angle_error(v_est, v_true):
    """Angle of ``R(v_est)^T R(v_true)`` in radians."""
    return float(np.linalg.norm(log(exp_rodrigues(v_est).T @ exp_rodrigues(v_true))))


@dataclass
class SolveReport:
    v_hat: np.ndarray
    iterations: int
    residual_history: list = field(default_factory=list)
    gradient_norm_history: list = field(default_factory=list)
    converged: bool = False
    method: str = "gauss-newton"

    def to_dict(self):
        return {
            "v_hat": [float(x) for x in self.v_hat],
            "iterations": self.iterations,
            "residual_history": [float(x) for x in self.residual_history],
            "gradient_norm_history": [float(x) for x in self.gradient_norm_history],
            "converged": self.converged,
            "method": self.method,
        }


METHODS = {"gauss-newton": "gauss-newton", "gn": "gauss-newton",
           "gradient-descent": "gradient-descent", "gd": "gradient-descent"}


def _cost(c, v):
    # same operation order as residual_and_jacobian so histories compare exactly
    R = exp_rodrigues(v)
    r = (c.sources @ R.T - c.targets).ravel()
    return 0.5 * float(r @ r)


def solve(c, v0=None, method="gauss-newton", max_iter=100, g_tol=1e-10,
          lambda0=1e-3, lambda_down=0.3, lambda_up=3.0, max_damping_increases=10,
          backtrack=0.5, armijo_c1=1e-4, max_backtracks=60):
    """Fit a rotation vector to ``c``; returns a :class:`SolveReport`.

    ``residual_history`` holds ``0.5 * ||r||^2`` at the start point and after
    every accepted step, ``gradient_norm_history`` the matching ``||J^T r||``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    method = METHODS[method]
    v = renormalize(np.zeros(3) if v0 is None else as_vector3(v0))

    r, J = residual_and_jacobian(c, v)
    cost = 0.5 * float(r @ r)
    g = J.T @ r
    costs = [cost]
    gnorms = [float(np.linalg.norm(g))]
    lam = lambda0
    it = 0
    converged = gnorms[-1] <= g_tol

    while not converged and it < max_iter:
        if method == "gauss-newton":
            JtJ = J.T @ J
            accepted = False
            increases = 0
            while increases <= max_damping_increases:
                A = JtJ + lam * np.eye(3)
                if np.linalg.cond(A) > 1e14:
                    lam *= lambda_up
                    increases += 1
                    if increases > max_damping_increases:
                        raise SingularNormalEquations(
                            "damped normal equations stayed singular")
                    continue
                step = -np.linalg.solve(A, g)
                v_new = renormalize(v + step)
                cost_new = _cost(c, v_new)
                if cost_new <= cost:
                    lam *= lambda_down
                    accepted = True
                    break
                lam *= lambda_up
                increases += 1
        else:
            alpha = 1.0
            g2 = float(g @ g)
            accepted = False
            for _ in range(max_backtracks):
                v_new = renormalize(v - alpha * g)
                cost_new = _cost(c, v_new)
                if cost_new <= cost - armijo_c1 * alpha * g2:
                    accepted = True
                    break
                alpha *= backtrack

        if not accepted:
            # no decrease is achievable at working precision
            break
        v = v_new
        it += 1
        r, J = residual_and_jacobian(c, v)
        cost = 0.5 * float(r @ r)
        g = J.T @ r
        costs.append(cost)
        gnorms.append(float(np.linalg.norm(g)))
        converged = gnorms[-1] <= g_tol

    return SolveReport(v, it, costs, gnorms, converged, method)

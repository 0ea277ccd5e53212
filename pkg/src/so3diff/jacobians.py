"""Derivatives of a rotation with respect to its exponential coordinates.

Two layouts are used throughout:

* ``d(R u)/dv`` is a 3x3 array whose column ``i`` is ``d(R u)/dv_i``.
* ``dR/dv`` is a (3, 3, 3) array of blocks ``D[i] = dR/dv_i``;
  :func:`jacobian_vec` turns it into the 9x3 matrix of ``vec(D[i])`` columns.
"""

import math
from typing import NamedTuple

import numpy as np

from .core import EPS_SMALL, _cross, _hat, as_vector3, exp_parts, exp_rodrigues, hat, vec

# a precomputed rotation must agree with exp(v) to this Frobenius distance
TOL_PRECOMPUTED = 1e-10

_E = np.eye(3)


def generators():
    """``G[i] = hat(e_i)``, the derivatives of exp at the identity."""
    return np.stack([hat(e) for e in _E])


def jacobian_vec(D):
    """9x3 matrix whose column ``i`` is ``vec(D[i])`` (column-major vec)."""
    D = np.asarray(D)
    return np.stack([vec(Di) for Di in D], axis=1)


def _rotation_for(v, R):
    """``(R, R - I)`` for ``v``, optionally using a caller-supplied ``R``."""
    Rv, dR = exp_parts(v)
    if R is None:
        return Rv, dR
    R = np.asarray(R, dtype=float)
    gap = np.linalg.norm(R - Rv)
    if not gap <= TOL_PRECOMPUTED:
        raise ValueError(
            f"precomputed R differs from exp(v) by {gap:.3e} (> {TOL_PRECOMPUTED:g})")
    return R, R - np.eye(3)


def _series_one_minus_cos_over(theta):
    # (1 - cos t) / t
    if theta < EPS_SMALL:
        t2 = theta * theta
        return theta * (0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    return 2.0 * math.sin(0.5 * theta) ** 2 / theta


def _series_sin_over(theta):
    if theta < EPS_SMALL:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return math.sin(theta) / theta


def drot_classical(v):
    """Four-term sine/cosine derivative of R(v), returned as (3, 3, 3) blocks.

    Expanded around the unit axis ``n = v / |v|``; at ``v = 0`` the blocks
    are the generators.
    """
    v = as_vector3(v)
    theta = float(np.linalg.norm(v))
    if theta == 0.0:
        return generators()
    n = v / theta
    N = _hat(n)
    N2 = N @ N
    nn = np.outer(n, n)
    c, s = math.cos(theta), math.sin(theta)
    sin_over = _series_sin_over(theta)
    omc_over = _series_one_minus_cos_over(theta)

    D = np.empty((3, 3, 3))
    for i in range(3):
        e = _E[i]
        D[i] = (c * n[i] * N
                + s * n[i] * N2
                + sin_over * _hat(e - n[i] * n)
                + omc_over * (np.outer(e, n) + np.outer(n, e) - 2.0 * n[i] * nn))
    return D


def dpoint_classical(v, u):
    """``d(R(v) u)/dv`` by contracting :func:`drot_classical` with ``u``."""
    u = as_vector3(u)
    return np.einsum("ijk,k->ji", drot_classical(v), u)


def dpoint_compact(v, u, R=None):
    """Compact derivative of the rotated point ``R(v) u``::

        -R [u]x (v v^T + (R^T - I) [v]x) / |v|^2

    Below ``EPS_SMALL`` the division is avoided and the series-guarded
    classical expansion is used; it tends to ``-hat(u)`` at ``v = 0``.

    ``R`` may be passed to reuse an already computed ``exp_rodrigues(v)``;
    it is checked against ``v``.
    """
    v = as_vector3(v)
    u = as_vector3(u)
    theta2 = float(v @ v)
    R, dR = _rotation_for(v, R)
    if math.sqrt(theta2) < EPS_SMALL:
        return dpoint_classical(v, u)
    bracket = np.outer(v, v) + dR.T @ _hat(v)
    return -(R @ _hat(u) @ bracket) / theta2


def drot_compact(v, R=None):
    """Compact derivative of R(v), as (3, 3, 3) blocks::

        D[i] = (v_i [v]x + [v x (I - R) e_i]x) R / |v|^2
    """
    v = as_vector3(v)
    theta2 = float(v @ v)
    R, dR = _rotation_for(v, R)
    if math.sqrt(theta2) < EPS_SMALL:
        return drot_classical(v)
    K = _hat(v)
    D = np.empty((3, 3, 3))
    for i in range(3):
        # (I - R) e_i is minus column i of R - I
        D[i] = (v[i] * K - _hat(_cross(v, dR[:, i]))) @ R / theta2
    return D


def default_step(v):
    return 1e-5 * max(1.0, float(np.linalg.norm(v)))


def fd_jacobian(f, v, h=None):
    """Central-difference Jacobian of ``f: R^3 -> R^N`` at ``v`` (N x 3).

    ``f`` may return any array shape; it is flattened in C order, so pass
    ``lambda x: vec(exp_rodrigues(x))`` to get the column-major layout.
    """
    v = np.asarray(v, dtype=float)
    if h is None:
        h = default_step(v)
    if not h > 0:
        raise ValueError("step h must be positive")
    cols = []
    for i in range(3):
        step = h * _E[i]
        fp = np.asarray(f(v + step), dtype=float).ravel()
        fm = np.asarray(f(v - step), dtype=float).ravel()
        cols.append((fp - fm) / (2.0 * h))
    return np.stack(cols, axis=1)


def fd_jacobian_extrapolated(f, v, h=1e-3):
    """Richardson-extrapolated central differences, truncation error O(h^4)."""
    coarse = fd_jacobian(f, v, h)
    fine = fd_jacobian(f, v, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def fd_drot(v, h=None):
    """Finite-difference ``dR/dv`` in the (3, 3, 3) block layout."""
    J = fd_jacobian(lambda x: vec(exp_rodrigues(x)), v, h)
    return np.stack([J[:, i].reshape(3, 3, order="F") for i in range(3)])


def fd_dpoint(v, u, h=None):
    u = as_vector3(u)
    return fd_jacobian(lambda x: exp_rodrigues(x) @ u, v, h)


class TaylorPrediction(NamedTuple):
    """First-order prediction of ``R(v + dv) u`` and its axis decomposition.

    ``point = base + parallel_term + perpendicular_term``, where the parallel
    term comes from the part of ``dv`` along the rotation axis (a change of
    angle only) and the perpendicular term from the rest (a change of axis).
    """
    point: np.ndarray
    base: np.ndarray
    dv_parallel: np.ndarray
    dv_perpendicular: np.ndarray
    parallel_term: np.ndarray
    perpendicular_term: np.ndarray


def taylor_predict(v, u, dv):
    v, u, dv = as_vector3(v), as_vector3(u), as_vector3(dv)
    R, dR = exp_parts(v)
    base = R @ u
    J = dpoint_compact(v, u, R)
    change = J @ dv
    theta = float(np.linalg.norm(v))
    if theta < EPS_SMALL:
        # axis is not resolvable; attribute the whole change to the perpendicular part
        zero = np.zeros(3)
        return TaylorPrediction(base + change, base, zero, dv.copy(), zero, change)
    n = v / theta
    dv_par = (dv @ n) * n
    dv_perp = dv - dv_par
    Ru = R @ _hat(u)
    par_term = -Ru @ dv_par
    perp_term = -Ru @ (dR.T @ (_hat(n) @ dv_perp)) / theta
    return TaylorPrediction(base + change, base, dv_par, dv_perp,
                            par_term, perp_term)

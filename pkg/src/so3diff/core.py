"""Rotation kernel in exponential coordinates.

Vectors are numpy arrays of shape (3,), matrices are (3, 3) arrays indexed
(row, column). ``vec`` stacks columns (Fortran order).
"""

import math

import numpy as np

EPS_SMALL = 1e-4
TOL_NORM = 1e-12
TOL_ORTHO = 1e-13
TOL_DET = 1e-12
TOL_SKEW = 1e-10
# below this the skew part of R cannot decide the axis sign of a half-turn
TOL_SIGN = 1e-12


class NotSkew(ValueError):
    pass


class NotARotation(ValueError):
    """Raised when a matrix fails one of the rotation invariants.

    ``invariant`` names the violated check: ``"shape"``, ``"finite"``,
    ``"orthogonality"`` or ``"determinant"``.
    """

    def __init__(self, invariant, message):
        super().__init__(message)
        self.invariant = invariant


def as_vector3(a):
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite components")
    return a


def as_matrix3(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def check_rotation(m):
    """Return ``m`` as a float array if it is a rotation, else raise NotARotation."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise NotARotation("shape", f"expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotARotation("finite", "matrix has non-finite entries")
    ortho = np.linalg.norm(m.T @ m - np.eye(3))
    if ortho > TOL_ORTHO:
        raise NotARotation(
            "orthogonality", f"||R^T R - I||_F = {ortho:.3e} exceeds {TOL_ORTHO:g}")
    det = np.linalg.det(m)
    if abs(det - 1.0) > TOL_DET:
        raise NotARotation(
            "determinant", f"det(R) = {det!r} is not within {TOL_DET:g} of 1")
    return m


def hat(a):
    """Cross-product matrix: ``hat(a) @ b == np.cross(a, b)``."""
    return _hat(as_vector3(a))


def _hat(a):
    # unchecked; a is a validated float 3-vector
    a1, a2, a3 = a
    return np.array([[0.0, -a3, a2],
                     [a3, 0.0, -a1],
                     [-a2, a1, 0.0]])


def _cross(a, b):
    # np.cross carries heavy per-call overhead for single 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def vee(M):
    """Inverse of :func:`hat`. Raises NotSkew unless ``||M + M^T||_F <= 1e-10``."""
    M = as_matrix3(M)
    asym = np.linalg.norm(M + M.T)
    if asym > TOL_SKEW:
        raise NotSkew(f"||M + M^T||_F = {asym:.3e} exceeds {TOL_SKEW:g}")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def vec(M):
    """Column-major stacking of a matrix into a flat vector."""
    return np.asarray(M).flatten(order="F")


def sinc_coeffs(theta):
    """Return ``(sin t / t, (1 - cos t) / t**2)`` with Taylor guards near zero."""
    if theta < EPS_SMALL:
        t2 = theta * theta
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    half = math.sin(0.5 * theta) / theta
    return math.sin(theta) / theta, 2.0 * half * half


def exp_parts(v):
    """Return ``(R, R - I)`` for rotation vector ``v``.

    ``R - I`` is assembled from the skew terms directly so it keeps full
    relative accuracy for small angles.
    """
    v = as_vector3(v)
    theta = float(np.linalg.norm(v))
    A, B = sinc_coeffs(theta)
    K = _hat(v)
    dR = A * K + B * (K @ K)
    return np.eye(3) + dR, dR


def exp_rodrigues(v):
    """Rotation matrix ``exp(hat(v))`` via the Euler-Rodrigues formula."""
    return exp_parts(v)[0]


def exp_rodrigues_outer(v):
    """Same rotation built as ``cos t I + sin t [n]x + (1 - cos t) n n^T``.

    Kept as a second construction path for cross-checking; at ``v = 0`` it
    returns the identity.
    """
    v = as_vector3(v)
    theta = float(np.linalg.norm(v))
    if theta == 0.0:
        return np.eye(3)
    n = v / theta
    c, s = math.cos(theta), math.sin(theta)
    return c * np.eye(3) + s * _hat(n) + (1.0 - c) * np.outer(n, n)


def exp_series(v, terms):
    """Partial sum ``sum_{k=0}^{terms} hat(v)**k / k!`` of the matrix exponential."""
    if int(terms) != terms or terms < 1:
        raise ValueError("terms must be a positive integer")
    K = hat(v)
    total = np.eye(3)
    term = np.eye(3)
    for k in range(1, int(terms) + 1):
        term = term @ K / k
        total = total + term
    return total


def _canonical_sign(axis):
    for x in axis:
        if abs(x) > TOL_SIGN:
            return axis if x > 0 else -axis
    return axis


def log(R):
    """Rotation vector ``v`` with ``exp_rodrigues(v) == R`` and ``||v|| <= pi``.

    The identity maps to the zero vector. For half-turns, where both ``n``
    and ``-n`` are valid axes, the axis whose first nonzero component is
    positive is returned.
    """
    R = check_rotation(R)
    # w = sin(theta) * n
    w = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = float(np.linalg.norm(w))
    c = min(1.0, max(-1.0, 0.5 * (np.trace(R) - 1.0)))
    # atan2 keeps full accuracy near 0 and pi, where arccos(c) does not
    theta = math.atan2(s, c)

    if theta < EPS_SMALL:
        t2 = theta * theta
        return w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    if c >= 0.0:
        return theta * (w / s)

    # Past a quarter turn w/sin(theta) loses accuracy; the symmetric part
    # (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) n n^T does not.
    S = 0.5 * (R + R.T) - c * np.eye(3)
    k = int(np.argmax(np.diag(S)))
    axis = S[:, k] / np.linalg.norm(S[:, k])
    d = float(axis @ w)
    if s > TOL_SIGN and abs(d) > TOL_SIGN:
        axis = axis if d > 0 else -axis
    else:
        axis = _canonical_sign(axis)
    return theta * axis


class AxisAngle:
    """Unit axis and angle in ``[0, pi]``."""

    __slots__ = ("axis", "angle")

    def __init__(self, axis, angle):
        axis = as_vector3(axis)
        if abs(np.linalg.norm(axis) - 1.0) > TOL_NORM:
            raise ValueError("axis must be a unit vector")
        if not 0.0 <= angle <= math.pi:
            raise ValueError("angle must lie in [0, pi]")
        self.axis = axis
        self.angle = float(angle)

    def __repr__(self):
        return f"AxisAngle(axis={self.axis.tolist()}, angle={self.angle!r})"

    def rotation_vector(self):
        return self.angle * self.axis


def log_axis_angle(R):
    """Axis-angle form of :func:`log`; the identity gets axis ``e1``."""
    v = log(R)
    theta = float(np.linalg.norm(v))
    if theta == 0.0:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), 0.0)
    return AxisAngle(v / theta, min(theta, math.pi))


IDENTITY_NAMES = (
    "cross_kernel",
    "cross_antisymmetry",
    "hat_product",
    "triple_product",
    "hat_of_cross_outer",
    "hat_of_cross_commutator",
    "hat_of_transformed_cross",
    "transformed_cross",
    "trace_hat",
    "hat_of_transformed",
)

# identities that need G^{-1}
_NEEDS_INVERSE = {"transformed_cross", "hat_of_transformed"}


class IdentityResidual:
    __slots__ = ("name", "residual", "scale", "skipped")

    def __init__(self, name, residual, scale, skipped=False):
        self.name = name
        self.residual = residual
        self.scale = scale
        self.skipped = skipped

    @property
    def relative(self):
        """Residual divided by ``max(1, scale)``; nan when skipped."""
        if self.skipped:
            return math.nan
        return self.residual / max(1.0, self.scale)

    def __repr__(self):
        if self.skipped:
            return f"IdentityResidual({self.name!r}, skipped)"
        return f"IdentityResidual({self.name!r}, {self.residual:.3e}, scale={self.scale:.3e})"


def identity_catalog_check(a, b, c, G):
    """Evaluate both sides of the cross-product identity catalog.

    Returns one :class:`IdentityResidual` per entry of ``IDENTITY_NAMES`` with
    the Frobenius (or Euclidean) norm of ``lhs - rhs``. ``scale`` is the
    larger of the two sides' norms, for relative comparisons. Identities that
    need ``G^{-1}`` are marked skipped when ``|det G| <= 1e-12``.
    """
    a, b, c = as_vector3(a), as_vector3(b), as_vector3(c)
    G = as_matrix3(G)
    I = np.eye(3)
    A, Bh = hat(a), hat(b)
    axb = np.cross(a, b)
    det = np.linalg.det(G)
    invertible = abs(det) > 1e-12
    Ginv = np.linalg.inv(G) if invertible else None

    sides = {
        "cross_kernel": lambda: (A @ a, np.zeros(3)),
        "cross_antisymmetry": lambda: (A @ b, -(Bh @ a)),
        "hat_product": lambda: (A @ Bh, np.outer(b, a) - (a @ b) * I),
        "triple_product": lambda: (np.cross(a, np.cross(b, c)), (a @ c) * b - (a @ b) * c),
        "hat_of_cross_outer": lambda: (hat(axb), np.outer(b, a) - np.outer(a, b)),
        "hat_of_cross_commutator": lambda: (hat(axb), A @ Bh - Bh @ A),
        "hat_of_transformed_cross": lambda: (hat(np.cross(G @ a, G @ b)), G @ hat(axb) @ G.T),
        "transformed_cross": lambda: (np.cross(G @ a, G @ b), det * Ginv.T @ axb),
        "trace_hat": lambda: (A @ G + G.T @ A, np.trace(G) * A - hat(G @ a)),
        "hat_of_transformed": lambda: (hat(G @ a), det * Ginv.T @ A @ Ginv),
    }
    out = []
    for name in IDENTITY_NAMES:
        if name in _NEEDS_INVERSE and not invertible:
            out.append(IdentityResidual(name, math.nan, math.nan, skipped=True))
            continue
        lhs, rhs = sides[name]()
        out.append(IdentityResidual(
            name,
            float(np.linalg.norm(lhs - rhs)),
            float(max(np.linalg.norm(lhs), np.linalg.norm(rhs)))))
    return out


def vector_to_json(v):
    # + 0.0 turns -0.0 into 0.0
    return [float(x) + 0.0 for x in np.asarray(v, dtype=float).ravel()]


def matrix_to_json(M):
    """Row-major nested list."""
    return [[float(x) + 0.0 for x in row] for row in np.asarray(M, dtype=float)]


def matrix_from_json(data):
    """Accept either a nested 3x3 list or a flat row-major list of 9."""
    m = np.asarray(data, dtype=float)
    if m.shape == (9,):
        m = m.reshape(3, 3)
    return as_matrix3(m)

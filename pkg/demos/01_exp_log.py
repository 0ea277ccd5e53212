"""Exponential and log maps: three ways to build R(v), and back again.

Run: python demos/01_exp_log.py
"""

import math

import numpy as np

from so3diff import exp_rodrigues, exp_rodrigues_outer, exp_series, log, log_axis_angle

np.set_printoptions(precision=6, suppress=True)

v = np.array([0.3, -0.7, 0.1])
R = exp_rodrigues(v)
print("R(v) for v =", v)
print(R)

# the outer-product form and the raw power series land on the same matrix
print("|skew form - outer form|  =", np.linalg.norm(R - exp_rodrigues_outer(v)))
print("|skew form - 30-term sum| =", np.linalg.norm(R - exp_series(v, 30)))

# orthogonal with unit determinant, as a rotation must be
print("|R^T R - I| =", np.linalg.norm(R.T @ R - np.eye(3)), " det =", np.linalg.det(R))

# log recovers v inside the ball |v| < pi
print("log(R) =", log(R))
aa = log_axis_angle(R)
print("axis", aa.axis, "angle", aa.angle)

# at exactly pi the axis sign is ambiguous; log picks the one whose first
# nonzero component is positive
half = exp_rodrigues([0.0, -math.pi, 0.0])
print("log of a half turn about -y:", log(half))

# beyond pi the same rotation comes back with a shorter vector
long_v = 4.0 * np.array([0.0, 0.6, 0.8])
print("log(R(4 n)) =", log(exp_rodrigues(long_v)), " norm", np.linalg.norm(log(exp_rodrigues(long_v))))

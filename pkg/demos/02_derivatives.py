"""Derivatives of R(v) and R(v) u, checked three ways.

Run: python demos/02_derivatives.py
"""

import numpy as np

from so3diff import dpoint_compact, drot_classical, drot_compact, generators, taylor_predict
from so3diff.jacobians import fd_dpoint, fd_drot

np.set_printoptions(precision=6, suppress=True)

v = np.array([0.4, -1.1, 0.2])
u = np.array([1.0, 2.0, 3.0])

D = drot_compact(v)
print("dR/dv_1 at v =", v)
print(D[0])
print("compact vs four-term classical:", np.abs(D - drot_classical(v)).max())
print("compact vs central differences:", np.abs(D - fd_drot(v)).max())

J = dpoint_compact(v, u)
print("\nd(R u)/dv, columns are the partials:")
print(J)
print("vs central differences:", np.abs(J - fd_dpoint(v, u)).max())

# near the identity the derivative tends to the generators hat(e_i)
for t in (1e-2, 1e-4, 1e-6):
    err = max(np.linalg.norm(Di - Gi) for Di, Gi in zip(drot_compact(t * v / np.linalg.norm(v)), generators()))
    print(f"t = {t:.0e}: max ||dR/dv_i - G_i|| = {err:.2e}")

# nudging along the axis only spins u further around it
n = v / np.linalg.norm(v)
p = taylor_predict(v, u, 1e-3 * n)
print("\naxial nudge: perpendicular term", p.perpendicular_term, "parallel term", p.parallel_term)
p = taylor_predict(v, u, np.array([1e-3, 1e-3, 0.0]))
print("generic nudge: parallel", p.parallel_term, "perpendicular", p.perpendicular_term)

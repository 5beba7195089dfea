"""Partial sums of the infinite dilogarithm series approach pi^2/4 slowly.

L(x) ~ x (1 - log(x) / 2) for small x, so the terms r > R contribute about
(log R + 2) / R. At R = 10^4 that is still above 1e-3.
"""

import math

from qfalse import dilog as d

for R in (10, 100, 1000, 10000, 12000, 100000):
    r = d.verify_dilog_identity(d.DilogIdentityId.SUPER_KIRILLOV_INF, R)
    print(f"R={R:6d}  error={r.error:.4e}  (log R + 2)/R={(math.log(R) + 2) / R:.4e}  {r.status}")

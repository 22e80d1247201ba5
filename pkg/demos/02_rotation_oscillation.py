"""Oscillating Birkhoff sums for a rotation of Diophantine type 4.

An irrational rotation with Diophantine type gamma = 4 comes back very
close to its start at the convergent denominators q_k and then stays far
away for a long stretch.  For phi(x) = d(x, 0)^-beta with beta = 2, the
sum S_n jumps at each close return and then grows slowly, so
log S_n / log n keeps oscillating between about 1 + beta/gamma and beta
instead of converging.

This demo builds the angle from its continued fraction, iterates the
rotation in exact 128-bit fixed point and prints the running ratio at
the convergent denominators.
"""

import numpy as np

from infscale import CircleRotation, construct_type, convergents, iterate_with_checkpoints
from infscale.dynamics import CheckpointSchedule, Point, random_point
from infscale.observables import DistPower
from infscale.processes import BirkhoffMaxMonitor

GAMMA, BETA, N_MAX = 4.0, 2.0, 10**7

cf = construct_type(GAMMA, 6)
qs = [q for _, q in convergents(cf, 6)]
print("partial quotients:", cf.prefix)
print("denominators q_k: ", qs)

m = CircleRotation(cf)
obs = DistPower(Point(0.0, (0,)), BETA, coords="fiber0")
x0 = random_point(m, np.random.default_rng(4))
S, _ = iterate_with_checkpoints(m, x0, CheckpointSchedule(N_MAX, 1.05), [BirkhoffMaxMonitor(obs)])[0]

keep = S.checkpoints >= 2
n, r = S.checkpoints[keep], np.log(S.values[keep]) / np.log(S.checkpoints[keep])
print("\n        n   log S_n / log n")
for t in np.geomspace(10, N_MAX, 19):
    i = int(np.searchsorted(n, t, side="right")) - 1
    print(f"{n[i]:>9}   {r[i]:.3f}")
tail = n >= qs[2]
print(f"\nover n in [{qs[2]}, {N_MAX}]: min {r[tail].min():.3f}, max {r[tail].max():.3f}")
print(f"bounds: liminf <= 1 + beta/gamma = {1 + BETA / GAMMA},  limsup >= beta = {BETA}")

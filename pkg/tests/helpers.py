"""Feed hand-made state sequences to monitors."""

import numpy as np

from infscale.dynamics import CheckpointSchedule, States


def states(base, t0=0, fibers=0):
    base = np.asarray(base, dtype=float)
    z = np.zeros((base.size, fibers), dtype=np.uint64)
    return States(t0, base, z, z.copy())


def feed(monitor, base, checkpoints, block=None):
    """Deliver states 0..n before recording each checkpoint n."""
    base = np.asarray(base, dtype=float)
    cps = list(checkpoints)
    monitor.start(CheckpointSchedule.explicit(cps))
    t = 0
    for n in cps:
        while t <= n:
            stop = n + 1 if block is None else min(n + 1, t + block)
            monitor.consume(states(base[t:stop], t0=t))
            t = stop
        monitor.record(n)
    return monitor.result()


class Identity:
    """Observable whose value is the base coordinate itself."""

    alpha_phi = None

    def values(self, st):
        return st.base.copy()

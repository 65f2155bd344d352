"""Per-trajectory normal deviate streams.

Each trajectory gets its own Philox generator keyed by ``(seed, trajectory)``.
Philox is counter-based, so distinct keys give independent streams and a
trajectory sees the same deviates no matter which thread runs it or when.
The same ``numpy.random.Generator`` objects are consumed from compiled code,
where numba reproduces NumPy's ziggurat sampler bit for bit.
"""
import numpy as np


def trajectory_generator(seed, trajectory):
    """NumPy generator for one trajectory of a run with the given seed."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if not 0 <= trajectory < 2**64:
        raise ValueError("trajectory index must be a 64-bit unsigned integer")
    key = np.array([seed, trajectory], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class NormalStream:
    """Standard normal deviates for a single trajectory, three per step."""

    def __init__(self, seed, trajectory):
        self.seed = int(seed)
        self.trajectory = int(trajectory)
        self.generator = trajectory_generator(self.seed, self.trajectory)

    def next_deviates(self):
        g = self.generator.standard_normal(3)
        return float(g[0]), float(g[1]), float(g[2])

    def block(self, count):
        """The next ``count`` steps' deviates as a ``(count, 3)`` array."""
        return self.generator.standard_normal((count, 3))

    def __repr__(self):
        return f"NormalStream(seed={self.seed}, trajectory={self.trajectory})"

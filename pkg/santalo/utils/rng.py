"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, *keys)`` so that batch
``b`` of case ``c`` draws the same numbers whichever worker runs it.
"""

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed) % 2**64, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def unit_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """Uniform points on S^{n-1} (normalised Gaussians)."""
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return g / norms

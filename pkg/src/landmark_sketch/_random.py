import numpy as np


def make_rng(seed: int | None, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``(seed, stream)``."""
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))

"""Per-purpose random streams derived from one master seed.

Every stream is ``SeedSequence([master, purpose, *counters])``: instance ``k``
draws its couplings from ``(master, INSTANCE, k)`` and its snapshots from
``(master, SHADOW, k)``, so changing ``T`` or ``N`` never perturbs the
couplings, and a shorter shadow is a prefix of a longer one.
"""
from __future__ import annotations

import numpy as np

INSTANCE = 1
SHADOW = 2
SPLIT = 3
CV_FOLDS = 4
SOLVER = 5
FEATURES = 6
NOISE = 7
OBSERVABLE = 8


def derive_seed(master: int, purpose: int, *counters: int) -> int:
    """A 63-bit integer seed, stable across platforms and numpy versions."""
    ss = np.random.SeedSequence([int(master), int(purpose), *(int(c) for c in counters)])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return int(((int(hi) << 32) | int(lo)) & ((1 << 63) - 1))


def stream(master: int, purpose: int, *counters: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, purpose, *counters))

"""Randomized single-qubit Pauli measurements and classical-shadow estimates."""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import CapacityError
from .hamiltonian import MAX_QUBITS, GroundStateResult
from .pauli import PauliString, PauliSum

BASES = "XYZ"
_CODE = {p: k for k, p in enumerate(BASES)}

_HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
# rotations taking the +1/-1 eigenvectors of X, Y, Z to |0>, |1>
_ROT = (
    _HAD,
    _HAD @ np.diag([1, -1j]),
    np.eye(2, dtype=complex),
)

MAX_SHADOW_WEIGHT = 4
_MAGIC = b"GLSH"
_VERSION = 1


@dataclass
class ShadowSet:
    """``T`` snapshots; ``bases[t, q]`` in {0: X, 1: Y, 2: Z}, ``outcomes`` in {+1, -1}."""

    bases: np.ndarray
    outcomes: np.ndarray
    n: int
    seed: Optional[int] = None

    def __post_init__(self):
        self.bases = np.asarray(self.bases, dtype=np.uint8)
        self.outcomes = np.asarray(self.outcomes, dtype=np.int8)
        if self.bases.ndim != 2 or self.bases.shape != self.outcomes.shape:
            raise ValueError("bases and outcomes must be matching (T, n) arrays")
        if self.bases.shape[1] != self.n or self.bases.shape[0] < 1:
            raise ValueError("every snapshot must cover all n qubits and T >= 1")

    @property
    def T(self) -> int:
        return self.bases.shape[0]

    def head(self, T: int) -> "ShadowSet":
        """The first ``T`` snapshots (nested subsets for shadow-size sweeps)."""
        if not 1 <= T <= self.T:
            raise ValueError(f"cannot take {T} of {self.T} snapshots")
        return ShadowSet(self.bases[:T].copy(), self.outcomes[:T].copy(), self.n, self.seed)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ShadowSet)
            and self.n == other.n
            and np.array_equal(self.bases, other.bases)
            and np.array_equal(self.outcomes, other.outcomes)
        )


def _rotate(V: np.ndarray, pattern: tuple[int, ...], n: int) -> np.ndarray:
    g = V.shape[1]
    psi = V.reshape((2,) * n + (g,))
    for q, b in enumerate(pattern):
        if b == 2:
            continue
        psi = np.moveaxis(np.tensordot(_ROT[b], psi, axes=([1], [q])), 0, q)
    return psi.reshape(1 << n, g)


def _born_cdf(gs: GroundStateResult, pattern: tuple[int, ...]) -> np.ndarray:
    rotated = _rotate(gs.vectors, pattern, gs.n)
    p = np.mean(np.abs(rotated) ** 2, axis=1)
    c = np.cumsum(p)
    return c / c[-1]


def sample_shadow(gs: GroundStateResult, T: int, seed) -> ShadowSet:
    """Draw ``T`` uniformly random Pauli bases per qubit and sample exact Born outcomes."""
    n = gs.n
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the shadow simulator cap")
    if T < 1:
        raise ValueError("T must be at least 1")
    rng = np.random.default_rng(seed)
    bases = rng.integers(0, 3, size=(T, n), dtype=np.uint8)
    u = rng.random(T)
    outcomes = np.empty((T, n), dtype=np.int8)
    if gs.vectors is None:
        bits = rng.integers(0, 2, size=(T, n))
        return ShadowSet(bases, (1 - 2 * bits).astype(np.int8), n, _seed_int(seed))
    cache: dict[tuple, np.ndarray] = {}
    shifts = np.arange(n - 1, -1, -1)
    for t in range(T):
        pattern = tuple(int(b) for b in bases[t])
        cdf = cache.get(pattern)
        if cdf is None:
            cdf = _born_cdf(gs, pattern)
            if n <= 12:
                cache[pattern] = cdf
        idx = min(int(np.searchsorted(cdf, u[t], side="right")), (1 << n) - 1)
        outcomes[t] = 1 - 2 * ((idx >> shifts) & 1)
    return ShadowSet(bases, outcomes, n, _seed_int(seed))


def _seed_int(seed) -> Optional[int]:
    return int(seed) if isinstance(seed, (int, np.integer)) else None


def _snapshot_values(sh: ShadowSet, P: PauliString) -> np.ndarray:
    if P.is_identity():
        raise ValueError("identity has no shadow estimator; its expectation is 1")
    if P.weight > MAX_SHADOW_WEIGHT:
        raise ValueError(f"weight-{P.weight} string exceeds the shadow estimator limit of {MAX_SHADOW_WEIGHT}")
    sites = np.array(P.sites)
    if sites.max() >= sh.n:
        raise ValueError("Pauli string acts outside the shadow register")
    codes = np.array([_CODE[p] for p in P.letters], dtype=np.uint8)
    match = np.all(sh.bases[:, sites] == codes, axis=1)
    vals = np.prod(3.0 * sh.outcomes[:, sites], axis=1)
    return np.where(match, vals, 0.0)


def estimate_pauli(sh: ShadowSet, P: PauliString, median_of_means: Optional[int] = None) -> float:
    vals = _snapshot_values(sh, P)
    if median_of_means is None or median_of_means <= 1:
        return float(np.mean(vals))
    batches = np.array_split(vals, median_of_means)
    return float(np.median([b.mean() for b in batches]))


def estimate_observable(sh: ShadowSet, O: PauliSum, median_of_means: Optional[int] = None) -> float:
    total = 0.0
    for P, a in O:
        if P.is_identity():
            total += a
        else:
            total += a * estimate_pauli(sh, P, median_of_means)
    return total


# --- file formats ---------------------------------------------------------


def _pack_records(sh: ShadowSet) -> np.ndarray:
    # per qubit: two basis bits then one outcome bit (1 means -1)
    bits = np.empty((sh.T, 3 * sh.n), dtype=np.uint8)
    bits[:, 0::3] = (sh.bases >> 1) & 1
    bits[:, 1::3] = sh.bases & 1
    bits[:, 2::3] = sh.outcomes < 0
    return np.packbits(bits, axis=1)


def write_shadow_binary(sh: ShadowSet, path) -> None:
    """Header ``magic, version, n, T, seed`` then one packed record per snapshot."""
    seed = -1 if sh.seed is None else sh.seed
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<BIQq", _VERSION, sh.n, sh.T, seed))
        fh.write(_pack_records(sh).tobytes())


def read_shadow_binary(path) -> ShadowSet:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path} is not a shadow file")
    hsize = struct.calcsize("<BIQq")
    version, n, T, seed = struct.unpack("<BIQq", data[4 : 4 + hsize])
    if version != _VERSION:
        raise ValueError(f"unsupported shadow file version {version}")
    rec = (3 * n + 7) // 8
    raw = np.frombuffer(data[4 + hsize :], dtype=np.uint8).reshape(T, rec)
    bits = np.unpackbits(raw, axis=1)[:, : 3 * n]
    bases = (bits[:, 0::3] << 1) | bits[:, 1::3]
    outcomes = 1 - 2 * bits[:, 2::3].astype(np.int8)
    return ShadowSet(bases, outcomes, n, None if seed < 0 else seed)


def write_shadow_csv(sh: ShadowSet, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["snapshot_id", "qubit", "basis", "outcome"])
        for t in range(sh.T):
            for q in range(sh.n):
                w.writerow([t, q, BASES[sh.bases[t, q]], int(sh.outcomes[t, q])])


def read_shadow_csv(path, n: int, seed=None) -> ShadowSet:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    T = 1 + max(int(r["snapshot_id"]) for r in rows)
    bases = np.zeros((T, n), dtype=np.uint8)
    outcomes = np.zeros((T, n), dtype=np.int8)
    for r in rows:
        t, q = int(r["snapshot_id"]), int(r["qubit"])
        bases[t, q] = _CODE[r["basis"]]
        outcomes[t, q] = int(r["outcome"])
    return ShadowSet(bases, outcomes, n, seed)

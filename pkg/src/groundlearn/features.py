"""Geometric feature maps over the rescaled parameter space ``[-1, 1]^m``.

Two maps live here:

* the indicator map: for every local Pauli ``P`` a grid over the coordinates
  ``I_P`` near ``P`` with spacing ``delta2``; ``phi(x)`` has a single one per
  ``P`` marking the grid cell containing ``x``.  Grids are indexed, never
  materialized.
* random Fourier features over local coupling windows, the practical map.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError
from .geometry import GeoRange, Lattice, enumerate_geo_paulis, obs_distance
from .hamiltonian import ParamHamiltonian
from .pauli import PauliString

MAX_CELLS = 2**48


def rescale(couplings) -> np.ndarray:
    """Couplings in ``[0, 2]`` to theory coordinates in ``[-1, 1]``."""
    return np.asarray(couplings, dtype=float) - 1.0


def unrescale(x) -> np.ndarray:
    return np.asarray(x, dtype=float) + 1.0


@dataclass(frozen=True)
class CoordinateSet:
    pauli: PauliString
    coords: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coords)


def compute_IP(H: ParamHamiltonian, lat: Lattice, P: PauliString, delta1: float) -> CoordinateSet:
    """Coordinates whose owning term lies within ``delta1`` of ``P``."""
    coords = tuple(c for c in range(H.m) if obs_distance(lat, H.term_of(c).support, P) <= delta1)
    return CoordinateSet(P, coords)


def restrict_chi(x, IP: CoordinateSet | Sequence[int]) -> np.ndarray:
    """Copy the coordinates in ``IP`` and zero the rest."""
    x = np.asarray(x, dtype=float)
    coords = IP.coords if isinstance(IP, CoordinateSet) else tuple(IP)
    out = np.zeros_like(x)
    idx = np.asarray(coords, dtype=int)
    out[idx] = x[idx]
    return out


def grid_levels(delta2: float) -> int:
    """``K = 1 / delta2``; the grid on one coordinate is ``{k / K : |k| <= K}``."""
    frac = Fraction(delta2).limit_denominator(10**6)
    if frac <= 0 or frac.numerator != 1 or abs(float(frac) - delta2) > 1e-12:
        raise ValueError(f"delta2 must be the reciprocal of a positive integer, got {delta2}")
    return frac.denominator


@dataclass(frozen=True)
class GridSpec:
    """Mixed-radix codec between cell indices and grid vectors on ``coords``.

    The first coordinate is the most significant digit, so index order is
    lexicographic in the grid values.
    """

    coords: tuple[int, ...]
    levels: int

    @property
    def base(self) -> int:
        return 2 * self.levels + 1

    @property
    def size(self) -> int:
        return self.base ** len(self.coords)

    @property
    def delta2(self) -> float:
        return 1.0 / self.levels

    def decode(self, index: int, m: int) -> np.ndarray:
        if not 0 <= index < self.size:
            raise IndexError(f"cell {index} outside grid of {self.size}")
        out = np.zeros(m)
        for c in reversed(self.coords):
            index, digit = divmod(index, self.base)
            out[c] = (digit - self.levels) / self.levels
        return out

    def encode_ints(self, ks: Sequence[int]) -> int:
        idx = 0
        for k in ks:
            idx = idx * self.base + (int(k) + self.levels)
        return idx

    def encode(self, xprime) -> int:
        """Index of a grid vector (values must lie on the grid)."""
        xprime = np.asarray(xprime, dtype=float)
        ks = np.rint(xprime[list(self.coords)] * self.levels).astype(int)
        return self.encode_ints(ks)

    def cell_of(self, x) -> int:
        return self.encode_ints(cell_ints(np.asarray(x, dtype=float)[list(self.coords)], self.levels))

    def contains(self, index: int, x) -> bool:
        """Membership of ``x`` in the thickened cell around grid vector ``index``."""
        g = self.decode(index, len(x))
        d = g[list(self.coords)] - np.asarray(x, dtype=float)[list(self.coords)]
        h = self.delta2 / 2
        return bool(np.all((-h < d) & (d <= h)))


def cell_ints(values: np.ndarray, levels: int) -> np.ndarray:
    """Grid integers ``k`` with ``-1/2 < k - K v <= 1/2``, i.e. ``k = floor(K v + 1/2)``."""
    ks = np.floor(np.asarray(values) * levels + 0.5).astype(np.int64)
    return np.clip(ks, -levels, levels)


def build_XP(IP: CoordinateSet | Sequence[int], delta2: float) -> GridSpec:
    coords = IP.coords if isinstance(IP, CoordinateSet) else tuple(IP)
    spec = GridSpec(tuple(coords), grid_levels(delta2))
    if spec.size > MAX_CELLS:
        raise CapacityError(
            f"grid of {spec.size} cells over {len(coords)} coordinates; "
            "increase delta2 or decrease delta1"
        )
    return spec


def cell_of(x, IP: CoordinateSet | Sequence[int], delta2: float) -> np.ndarray:
    """The grid vector ``x'`` whose thickened cell contains ``x``."""
    spec = build_XP(IP, delta2)
    return spec.decode(spec.cell_of(x), len(x))


@dataclass(frozen=True)
class FeatureEntry:
    ip: CoordinateSet
    grid: GridSpec
    offset: int


@dataclass
class IndicatorFeatureMap:
    delta1: float
    delta2: float
    entries: list[FeatureEntry]
    m: int

    @classmethod
    def build(
        cls,
        H: ParamHamiltonian,
        delta1: float,
        delta2: float,
        rng: Optional[GeoRange] = None,
        paulis: Optional[Sequence[PauliString]] = None,
        delta2_for: Optional[Callable[[int], float]] = None,
    ) -> "IndicatorFeatureMap":
        """Map over ``paulis`` (default: all local strings of range ``rng``).

        ``delta2_for(|I_P|)`` switches on a per-string grid spacing.
        """
        lat = H.lattice
        rng = rng or H.range
        if paulis is None:
            paulis = enumerate_geo_paulis(lat, rng)
        entries = []
        offset = 0
        for P in paulis:
            ip = compute_IP(H, lat, P, delta1)
            d2 = delta2_for(len(ip)) if delta2_for else delta2
            grid = build_XP(ip, d2)
            entries.append(FeatureEntry(ip, grid, offset))
            offset += grid.size
        if offset >= 2**62:
            raise CapacityError("total feature count overflows 64-bit indexing")
        return cls(delta1, delta2, entries, H.m)

    @property
    def m_phi(self) -> int:
        return sum(e.grid.size for e in self.entries)

    @property
    def n_paulis(self) -> int:
        return len(self.entries)

    def active_columns(self, x) -> np.ndarray:
        """Column index of the single active cell for every Pauli block."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.m,):
            raise ValueError(f"expected a length-{self.m} parameter vector")
        return np.array([e.offset + e.grid.cell_of(x) for e in self.entries], dtype=np.int64)

    def column_owner(self, col: int) -> FeatureEntry:
        lo, hi = 0, len(self.entries)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.entries[mid].offset <= col:
                lo = mid
            else:
                hi = mid
        return self.entries[lo]

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "kind": "indicator",
            "delta1": self.delta1,
            "delta2": self.delta2,
            "m": self.m,
            "m_phi": self.m_phi,
            "entries": [
                {
                    "pauli": e.ip.pauli.label(),
                    "coords": list(e.ip.coords),
                    "levels": e.grid.levels,
                    "offset": e.offset,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IndicatorFeatureMap":
        entries = []
        for d in data["entries"]:
            P = PauliString.parse(d["pauli"])
            ip = CoordinateSet(P, tuple(d["coords"]))
            entries.append(FeatureEntry(ip, GridSpec(ip.coords, d["levels"]), d["offset"]))
        return cls(data["delta1"], data["delta2"], entries, data["m"])


def phi_indicator(fm: IndicatorFeatureMap, x) -> sp.csr_matrix:
    """``phi(x)`` as a ``1 x m_phi`` sparse binary row."""
    cols = fm.active_columns(x)
    return sp.csr_matrix((np.ones(len(cols)), (np.zeros(len(cols), dtype=int), cols)), shape=(1, fm.m_phi))


def indicator_design(fm: IndicatorFeatureMap, X) -> sp.csr_matrix:
    """Stack ``phi(x)`` rows for a batch of parameter vectors."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    cols = np.array([fm.active_columns(x) for x in X])
    rows = np.repeat(np.arange(len(X)), fm.n_paulis)
    return sp.csr_matrix((np.ones(cols.size), (rows, cols.ravel())), shape=(len(X), fm.m_phi))


# --- random Fourier features ------------------------------------------------


def term_regions(H: ParamHamiltonian, delta1: float) -> list[tuple[int, ...]]:
    """For each term, the coordinates of all terms within ``delta1`` of it."""
    lat = H.lattice
    out = []
    for t in H.terms:
        coords = [c for c in range(H.m) if obs_distance(lat, H.term_of(c).support, t.support) <= delta1]
        out.append(tuple(coords))
    return out


@dataclass
class RffMap:
    regions: list[tuple[int, ...]]
    n_features: int
    gamma: float
    seed: int
    m: int
    omegas: list[np.ndarray] = field(default_factory=list, repr=False)

    @classmethod
    def build(cls, H: ParamHamiltonian, delta1: float, n_features: int, gamma: float, seed: int) -> "RffMap":
        return cls.from_regions(term_regions(H, delta1), H.m, n_features, gamma, seed)

    @classmethod
    def from_regions(cls, regions, m: int, n_features: int, gamma: float, seed: int) -> "RffMap":
        if n_features < 1 or gamma <= 0:
            raise ValueError("need n_features >= 1 and gamma > 0")
        omegas = []
        for r, coords in enumerate(regions):
            # one stream per region; rows are drawn in order, so a smaller
            # n_features is a prefix of a larger one
            g = np.random.default_rng([int(seed), r])
            omegas.append(g.standard_normal((n_features, len(coords))))
        return cls([tuple(c) for c in regions], n_features, float(gamma), int(seed), m, omegas)

    @property
    def dim(self) -> int:
        return 2 * self.n_features * len(self.regions)

    def feature_region(self, k: int) -> int:
        return k // (2 * self.n_features)

    def transform(self, X) -> np.ndarray:
        """Feature rows for a batch ``X`` of shape ``(N, m)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.m:
            raise ValueError(f"expected parameter vectors of length {self.m}")
        blocks = []
        for coords, om in zip(self.regions, self.omegas):
            z = X[:, list(coords)]
            arg = (self.gamma / math.sqrt(len(coords))) * z @ om.T
            blk = np.empty((len(X), 2 * self.n_features))
            blk[:, 0::2] = np.cos(arg)
            blk[:, 1::2] = np.sin(arg)
            blocks.append(blk)
        return np.hstack(blocks)

    def fingerprint(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "kind": "rff",
            "regions": [list(r) for r in self.regions],
            "n_features": self.n_features,
            "gamma": self.gamma,
            "seed": self.seed,
            "m": self.m,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RffMap":
        return cls.from_regions(data["regions"], data["m"], data["n_features"], data["gamma"], data["seed"])


def phi_rff(rff: RffMap, x) -> np.ndarray:
    return rff.transform(np.asarray(x, dtype=float)[None, :])[0]


def theory_delta1(eps: float, c_max: float, floor: float = 0.0) -> float:
    """``max(c_max * log(1/eps)**2, floor)`` with user-supplied constants."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return max(c_max * math.log(1.0 / eps) ** 2, floor)


def theory_delta2(eps: float, c_prime: float, ip_size: int) -> float:
    """``1 / ceil(sqrt(c_prime * |I_P|) / eps)``."""
    return 1.0 / math.ceil(math.sqrt(c_prime * ip_size) / eps)


def save_feature_map(fm, path) -> None:
    with open(path, "w") as fh:
        json.dump(fm.to_json(), fh, sort_keys=True, indent=1)


def feature_map_from_json(data: dict):
    return IndicatorFeatureMap.from_json(data) if data["kind"] == "indicator" else RffMap.from_json(data)


def load_feature_map(path):
    with open(path) as fh:
        return feature_map_from_json(json.load(fh))


def write_triplets(mat, path) -> None:
    """Sparse ``(row, col, value)`` CSV export of a feature matrix."""
    coo = sp.coo_matrix(mat)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write("row,col,value\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{int(r)},{int(c)},{float(v)!r}\n")

"""Hypercubic qubit lattices, l1 distances and geometrically local Pauli strings."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .pauli import LETTERS, PauliString

SiteSet = Union[PauliString, Iterable[int]]


@dataclass(frozen=True)
class Lattice:
    """Open-boundary hypercubic lattice; site ``i`` has row-major coordinates."""

    sides: tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        if not sides or any(s < 1 for s in sides):
            raise ValueError(f"lattice sides must be positive, got {self.sides}")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def from_config(cls, cfg: dict) -> "Lattice":
        return cls(tuple(cfg["sides"]))

    def to_config(self) -> dict:
        return {"sides": list(self.sides)}

    @property
    def dims(self) -> int:
        return len(self.sides)

    @property
    def n(self) -> int:
        return math.prod(self.sides)

    def check_site(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise ValueError(f"site {i} outside lattice of {self.n} sites")
        return i

    def coords(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(self.check_site(i), self.sides))

    def index(self, coords: Sequence[int]) -> int:
        if len(coords) != self.dims or any(not 0 <= c < s for c, s in zip(coords, self.sides)):
            raise ValueError(f"coordinates {tuple(coords)} outside lattice {self.sides}")
        return int(np.ravel_multi_index(tuple(coords), self.sides))

    def all_coords(self) -> np.ndarray:
        return np.array([self.coords(i) for i in range(self.n)], dtype=int)

    def edges(self) -> list[tuple[int, int]]:
        """Nearest-neighbour pairs ``(i, j)`` with ``i < j``, sorted."""
        out = []
        for i in range(self.n):
            c = self.coords(i)
            for k in range(self.dims):
                if c[k] + 1 < self.sides[k]:
                    nb = list(c)
                    nb[k] += 1
                    out.append((i, self.index(nb)))
        return sorted(out)

    def diameter(self) -> int:
        return sum(s - 1 for s in self.sides)


@dataclass(frozen=True)
class GeoRange:
    """Per-axis support extents ``R_k``; ``R`` is their product."""

    per_axis: tuple[int, ...]

    def __post_init__(self):
        per_axis = tuple(int(r) for r in self.per_axis)
        if not per_axis or any(r < 1 for r in per_axis):
            raise ValueError(f"ranges must be >= 1, got {self.per_axis}")
        object.__setattr__(self, "per_axis", per_axis)

    @classmethod
    def uniform(cls, lat: Lattice, r: int = 2) -> "GeoRange":
        return cls((r,) * lat.dims)

    @property
    def R(self) -> int:
        return math.prod(self.per_axis)


def qubit_distance(lat: Lattice, i: int, j: int) -> int:
    ci, cj = lat.coords(i), lat.coords(j)
    return sum(abs(a - b) for a, b in zip(ci, cj))


def _sites(obj: SiteSet) -> list[int]:
    if isinstance(obj, PauliString):
        return list(obj.sites)
    return [int(s) for s in obj]


def obs_distance(lat: Lattice, a: SiteSet, b: SiteSet) -> int:
    """Minimum qubit distance between the supports of two observables."""
    sa, sb = _sites(a), _sites(b)
    if not sa or not sb:
        raise ValueError("observable with empty support has no location")
    return min(qubit_distance(lat, i, j) for i in sa for j in sb)


def support_extent(lat: Lattice, sites: Iterable[int]) -> tuple[int, ...]:
    """Per-axis ``max - min`` of the coordinates of ``sites``."""
    c = np.array([lat.coords(s) for s in sites])
    return tuple(int(v) for v in c.max(axis=0) - c.min(axis=0))


def is_geo_local(lat: Lattice, rng: GeoRange, sites: Iterable[int]) -> bool:
    ext = support_extent(lat, sites)
    return all(e <= r for e, r in zip(ext, rng.per_axis))


def enumerate_geo_paulis(lat: Lattice, rng: GeoRange) -> list[PauliString]:
    """All non-identity Pauli strings whose per-axis extent is at most ``R_k``.

    Built window by window: every support fits in an axis-aligned box of
    ``R_k + 1`` sites anchored at its per-axis minimum, so each string is
    produced exactly once from its own anchor.
    """
    if len(rng.per_axis) != lat.dims:
        raise ValueError("range dimension does not match lattice")
    found = set()  # boxes are clipped at the boundary, so any range is allowed
    for anchor in itertools.product(*(range(s) for s in lat.sides)):
        box_axes = [range(a, min(a + r, s - 1) + 1) for a, r, s in zip(anchor, rng.per_axis, lat.sides)]
        box = [lat.index(c) for c in itertools.product(*box_axes)]
        for k in range(1, len(box) + 1):
            for sub in itertools.combinations(box, k):
                mins = np.array([lat.coords(s) for s in sub]).min(axis=0)
                if tuple(mins) != anchor:
                    continue
                for letters in itertools.product(LETTERS, repeat=k):
                    found.add(PauliString(tuple(zip(sub, letters))))
    return sorted(found, key=_canonical_key)


def _canonical_key(P: PauliString):
    return (P.sites, P.letters)

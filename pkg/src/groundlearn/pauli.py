"""Sparse Pauli words, real-coefficient Pauli sums and their matrix forms.

Qubit ``q`` of an ``n``-qubit register is the ``q``-th tensor factor, i.e. it
owns bit ``n - 1 - q`` of a computational-basis index (``kron`` ordering).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sp

LETTERS = ("X", "Y", "Z")

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, order=True)
class PauliString:
    """A Pauli word stored as a sorted tuple of ``(site, letter)`` pairs.

    Sites missing from ``support`` carry the identity, so the empty tuple is
    the identity string.
    """

    support: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        items = tuple(sorted((int(s), str(p)) for s, p in self.support))
        sites = [s for s, _ in items]
        if len(set(sites)) != len(sites):
            raise ValueError(f"repeated site in Pauli support {items}")
        for s, p in items:
            if p not in LETTERS:
                raise ValueError(f"unknown Pauli letter {p!r}")
            if s < 0:
                raise ValueError(f"negative site index {s}")
        object.__setattr__(self, "support", items)

    @classmethod
    def from_dict(cls, mapping: Mapping[int, str]) -> "PauliString":
        return cls(tuple(mapping.items()))

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"X0 Z3"`` style labels; ``"I"`` or ``""`` is the identity."""
        text = text.strip()
        if text in ("", "I"):
            return cls()
        return cls(tuple((int(tok[1:]), tok[0]) for tok in text.split()))

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.support)

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(p for _, p in self.support)

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_identity(self) -> bool:
        return not self.support

    def as_dict(self) -> dict[int, str]:
        return dict(self.support)

    def label(self) -> str:
        if not self.support:
            return "I"
        return " ".join(f"{p}{s}" for s, p in self.support)

    def __str__(self) -> str:
        return self.label()


def pauli_masks(P: PauliString, n: int) -> tuple[int, int, int]:
    """``(x_mask, z_mask, y_count)`` of ``P`` over the bits of a basis index."""
    xm = zm = 0
    ny = 0
    for s, p in P.support:
        if s >= n:
            raise ValueError(f"site {s} outside an {n}-qubit register")
        bit = 1 << (n - 1 - s)
        if p in ("X", "Y"):
            xm |= bit
        if p in ("Z", "Y"):
            zm |= bit
        if p == "Y":
            ny += 1
    return xm, zm, ny


def _popcount_parity(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    parity = np.zeros_like(a)
    while np.any(a):
        parity ^= a & 1
        a >>= 1
    return parity


def pauli_action(P: PauliString, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``P|b> = phase[b] |cols[b]>`` as index/phase arrays of length ``2**n``."""
    xm, zm, ny = pauli_masks(P, n)
    b = np.arange(1 << n, dtype=np.int64)
    # Y = i X Z: apply Z first (sign from input bits), then flip
    sign = 1 - 2 * _popcount_parity(b & zm)
    phase = (1j) ** ny * sign
    return b ^ xm, phase.astype(complex)


def pauli_sparse(P: PauliString, n: int) -> sp.csr_matrix:
    target, phase = pauli_action(P, n)
    dim = 1 << n
    return sp.csr_matrix((phase, (target, np.arange(dim))), shape=(dim, dim))


def pauli_dense(P: PauliString, n: int) -> np.ndarray:
    """Dense matrix by explicit Kronecker products (independent of the bit-mask path)."""
    d = P.as_dict()
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(out, _SINGLE[d.get(q, "I")])
    return out


def local_pauli_matrix(letters: Iterable[str]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for p in letters:
        out = np.kron(out, _SINGLE[p])
    return out


def apply_pauli(P: PauliString, psi: np.ndarray, n: int) -> np.ndarray:
    """Apply ``P`` to a state vector (or to the columns of a matrix)."""
    target, phase = pauli_action(P, n)
    out = np.empty_like(psi, dtype=complex)
    if psi.ndim == 1:
        out[target] = phase * psi
    else:
        out[target] = phase[:, None] * psi
    return out


@dataclass
class PauliSum:
    """Real linear combination of Pauli strings; zero coefficients are dropped."""

    terms: dict[PauliString, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for P, a in self.terms.items():
            a = float(a)
            if a != 0.0:
                clean[P] = clean.get(P, 0.0) + a
        self.terms = {P: a for P, a in clean.items() if a != 0.0}

    def __iter__(self) -> Iterator[tuple[PauliString, float]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        out = dict(self.terms)
        for P, a in other.terms.items():
            out[P] = out.get(P, 0.0) + a
        return PauliSum(out)

    def scale(self, c: float) -> "PauliSum":
        return PauliSum({P: c * a for P, a in self.terms.items()})

    def coefficient(self, P: PauliString) -> float:
        return self.terms.get(P, 0.0)

    def max_site(self) -> int:
        return max((s for P in self.terms for s in P.sites), default=-1)

    def to_sparse(self, n: int) -> sp.csr_matrix:
        dim = 1 << n
        out = sp.csr_matrix((dim, dim), dtype=complex)
        for P, a in self:
            out = out + a * pauli_sparse(P, n)
        return out.tocsr()

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros((1 << n, 1 << n), dtype=complex)
        for P, a in self:
            target, phase = pauli_action(P, n)
            out[target, np.arange(1 << n)] += a * phase
        return out

"""Pauli 1-norm of local observables and a constructive check of

    sum_Q |alpha_Q|  <=  2^d R 4^R Tr(O rho)  <=  2^d R 4^R ||O||_inf

for an explicitly built test state ``rho``.

Blocks: along axis ``k`` and for shift ``j_k`` in ``0..2R_k-1`` the ``i``-th
block (``i >= 1``) covers the 0-based coordinates
``(2i-2)R_k + j_k .. (2i-1)R_k + j_k - 1``, i.e. the 1-based interval
``[(2i-2)R_k + j_k + 1, (2i-1)R_k + j_k]`` shifted down by one.  Only blocks
lying wholly inside the lattice are kept.  A string is assigned to the
lexicographically first ``(i, j)`` whose block contains its support, so every
string lives in exactly one set ``S_(i,j)``.

Blocks hold ``R_k`` sites per axis, so a string is assignable only when its
per-axis extent is at most ``R_k - 1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse.linalg as spla

from .errors import CapacityError
from .geometry import GeoRange, Lattice, support_extent
from .pauli import PauliString, PauliSum, local_pauli_matrix, pauli_dense

Shift = tuple[int, ...]
BlockIndex = tuple[int, ...]


def pauli_decompose(terms: Iterable[tuple[Sequence[int], np.ndarray]], atol: float = 1e-10) -> PauliSum:
    """Pauli coefficients ``Tr(P h) / 2^k`` of local Hermitian terms, summed.

    ``terms`` yields ``(support, matrix)`` with the matrix in ``kron`` order
    over ``support`` as listed.
    """
    out: dict[PauliString, float] = {}
    for support, h in terms:
        support = tuple(int(s) for s in support)
        k = len(support)
        if k > 4:
            raise ValueError("term support is limited to 4 sites")
        h = np.asarray(h, dtype=complex)
        if h.shape != (1 << k, 1 << k):
            raise ValueError(f"matrix shape {h.shape} does not match {k} sites")
        if np.max(np.abs(h - h.conj().T)) > atol:
            raise ValueError("term is not Hermitian")
        floor = 1e-14 * max(1.0, float(np.max(np.abs(h))))  # round-off, e.g. from trace removal
        for letters in itertools.product("IXYZ", repeat=k):
            c = np.trace(local_pauli_matrix(letters) @ h) / (1 << k)
            if abs(c.imag) > atol:
                raise ValueError("complex Pauli coefficient from a Hermitian term")
            if abs(c.real) <= floor:
                continue
            P = PauliString(tuple((s, p) for s, p in zip(support, letters) if p != "I"))
            out[P] = out.get(P, 0.0) + c.real
    return PauliSum(out)


def pauli_one_norm(O: PauliSum) -> float:
    return float(sum(abs(a) for _, a in O))


def all_shifts(rng: GeoRange) -> list[Shift]:
    return list(itertools.product(*(range(2 * r) for r in rng.per_axis)))


@dataclass
class BlockPartition:
    shift: Shift
    blocks: dict[BlockIndex, frozenset[int]]
    buffer: frozenset[int]


def _axis_blocks(side: int, r: int, j: int) -> list[range]:
    count = (side - j + r) // (2 * r)
    return [range((2 * i - 2) * r + j, (2 * i - 1) * r + j) for i in range(1, count + 1)]


def build_partition(lat: Lattice, rng: GeoRange, shift: Shift) -> BlockPartition:
    if len(shift) != lat.dims or any(not 0 <= j < 2 * r for j, r in zip(shift, rng.per_axis)):
        raise ValueError(f"shift {shift} outside 0..2R_k-1")
    per_axis = [_axis_blocks(s, r, j) for s, r, j in zip(lat.sides, rng.per_axis, shift)]
    blocks = {}
    for combo in itertools.product(*(list(enumerate(a, start=1)) for a in per_axis)):
        idx = tuple(i for i, _ in combo)
        sites = frozenset(lat.index(c) for c in itertools.product(*(rg for _, rg in combo)))
        blocks[idx] = sites
    covered = frozenset().union(*blocks.values()) if blocks else frozenset()
    return BlockPartition(tuple(shift), blocks, frozenset(range(lat.n)) - covered)


class AssignmentError(RuntimeError):
    """A string fits in no block for any shift."""


@dataclass
class BlockAssignment:
    lattice: Lattice
    range: GeoRange
    partitions: dict[Shift, BlockPartition]
    sets: dict[tuple[BlockIndex, Shift], list[PauliString]]
    home: dict[PauliString, tuple[BlockIndex, Shift]]
    weights: dict[Shift, float]
    best_shift: Shift

    def U(self, shift: Shift) -> list[PauliString]:
        return sorted(P for P, (_, j) in self.home.items() if j == shift)


def _check_support(lat: Lattice, rng: GeoRange, P: PauliString) -> None:
    if P.is_identity():
        raise ValueError("the identity component has no location; remove it before assignment")
    ext = support_extent(lat, P.sites)
    if any(e > r - 1 for e, r in zip(ext, rng.per_axis)):
        raise ValueError(f"{P} has extent {ext}; blocks of range {rng.per_axis} hold extent <= R_k - 1")


def assign_strings(O: PauliSum, lat: Lattice, rng: GeoRange) -> BlockAssignment:
    partitions = {j: build_partition(lat, rng, j) for j in all_shifts(rng)}
    order = sorted((i, j) for j, part in partitions.items() for i in part.blocks)
    home: dict[PauliString, tuple] = {}
    sets: dict[tuple, list[PauliString]] = {key: [] for key in order}
    for P, _ in O:
        if P.is_identity():
            raise ValueError("the identity component has no location; remove it before assignment")
        sup = set(P.sites)
        for i, j in order:
            if sup <= partitions[j].blocks[i]:
                home[P] = (i, j)
                sets[(i, j)].append(P)
                break
        else:
            raise AssignmentError(f"{P} is contained in no block for any shift")
    weights = {j: 0.0 for j in partitions}
    for P, a in O:
        weights[home[P][1]] += abs(a)
    best = None
    for j in sorted(weights):
        if best is None or weights[j] > weights[best]:
            best = j
    return BlockAssignment(lat, rng, partitions, sets, home, weights, best)


@dataclass
class TestState:
    """Factored test state: one block operator per block of the chosen shift,
    maximally mixed on the buffer."""

    __test__ = False  # keep pytest from collecting this class

    n: int
    shift: Shift
    block_terms: dict[BlockIndex, list[tuple[PauliString, int]]]  # (Q, sign)
    block_sites: dict[BlockIndex, frozenset[int]]
    buffer: frozenset[int]

    def to_dense(self) -> np.ndarray:
        if self.n > 10:
            raise CapacityError("dense test state is limited to 10 qubits")
        dim = 1 << self.n
        rho = np.eye(dim, dtype=complex)
        for terms in self.block_terms.values():
            if not terms:
                continue
            factor = np.eye(dim, dtype=complex)
            for Q, sgn in terms:
                factor = factor + (sgn / len(terms)) * pauli_dense(Q, self.n)
            rho = rho @ factor
        return rho / dim


def build_test_state(assign: BlockAssignment, O: PauliSum) -> TestState:
    j = assign.best_shift
    part = assign.partitions[j]
    terms = {}
    for i in part.blocks:
        terms[i] = [(Q, -1 if O.coefficient(Q) < 0 else 1) for Q in assign.sets[(i, j)]]
    return TestState(assign.lattice.n, j, terms, dict(part.blocks), part.buffer)


def trace_against(assign: BlockAssignment, O: PauliSum) -> float:
    """``sum_{P in U_j*} |alpha_P| / |S_(i_P, j*)|`` without building any matrix."""
    j = assign.best_shift
    total = 0.0
    for P in assign.U(j):
        total += abs(O.coefficient(P)) / len(assign.sets[assign.home[P]])
    return total


def spectral_norm(O: PauliSum, n: int) -> float:
    if n <= 12:
        return float(np.max(np.abs(np.linalg.eigvalsh(O.to_dense(n)))))
    if n <= 16:
        mat = O.to_sparse(n)
        hi = spla.eigsh(mat, k=1, which="LA", return_eigenvectors=False)[0]
        lo = spla.eigsh(mat, k=1, which="SA", return_eigenvectors=False)[0]
        return float(max(abs(hi), abs(lo)))
    raise CapacityError("spectral norm is limited to 16 qubits")


@dataclass
class NormReport:
    sum_abs_alpha: float
    trace_analytic: float
    spectral_norm: float
    bound_constant: float
    trace_dense: Optional[float] = None
    best_shift: Shift = ()
    best_shift_weight: float = 0.0
    max_set_size: int = 0
    flags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_json(self) -> dict:
        out = {
            "sum_abs_alpha": self.sum_abs_alpha,
            "trace_analytic": self.trace_analytic,
            "spectral_norm": self.spectral_norm,
            "bound_constant": self.bound_constant,
            "best_shift": list(self.best_shift),
            "checks": dict(self.flags),
            "pass": self.passed,
        }
        if self.trace_dense is not None:
            out["trace_dense"] = self.trace_dense
        return out


def verify_inequality(O: PauliSum, lat: Lattice, rng: GeoRange, dense: Optional[bool] = None,
                      rtol: float = 1e-10) -> NormReport:
    n = lat.n
    if n > 16:
        raise CapacityError("verify_inequality needs the spectral norm; limited to 16 qubits")
    for P, _ in O:
        _check_support(lat, rng, P)
    d, R = lat.dims, rng.R
    const = float(2**d * R * 4**R)
    assign = assign_strings(O, lat, rng)
    total = pauli_one_norm(O)
    tr = trace_against(assign, O)
    norm = spectral_norm(O, n) if len(O) else 0.0
    slack = rtol * max(1.0, total)
    max_set = max((len(s) for s in assign.sets.values()), default=0)
    flags = {
        "shift_average": assign.weights[assign.best_shift] * 2**d * R >= total - slack,
        "set_size": max_set <= 4**R,
        "intermediate": total <= const * tr + slack,
        "trace_below_norm": tr <= norm + slack,
        "norm_bound": total <= const * norm + slack,
    }
    report = NormReport(total, tr, norm, const, None, assign.best_shift, assign.weights[assign.best_shift], max_set, flags)
    if dense is None:
        dense = n <= 10
    if dense:
        rho = build_test_state(assign, O).to_dense()
        report.trace_dense = float(np.real(np.trace(O.to_dense(n) @ rho)))
        flags["dense_matches_analytic"] = abs(report.trace_dense - tr) <= 1e-10
    return report


def random_local_terms(lat: Lattice, georange: GeoRange, gen: np.random.Generator, n_terms: int,
                       max_sites: int = 3) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Random traceless Hermitian terms, each on up to ``max_sites`` sites inside a
    box of per-axis extent ``R_k - 1``."""
    terms = []
    for _ in range(n_terms):
        anchor = [int(gen.integers(0, s)) for s in lat.sides]
        axes = [range(a, min(a + r - 1, s - 1) + 1) for a, r, s in zip(anchor, georange.per_axis, lat.sides)]
        box = [lat.index(c) for c in itertools.product(*axes)]
        k = int(gen.integers(1, min(max_sites, len(box)) + 1))
        support = tuple(sorted(int(s) for s in gen.choice(box, size=k, replace=False)))
        A = gen.standard_normal((1 << k, 1 << k)) + 1j * gen.standard_normal((1 << k, 1 << k))
        h = (A + A.conj().T) / 2
        h -= np.trace(h) / (1 << k) * np.eye(1 << k)
        terms.append((support, h))
    return terms

"""Parameterized local Hamiltonians, exact ground states and observables.

Exact diagonalization plays the role of the label oracle: dense ``eigh`` up to
12 qubits, Lanczos (``scipy.sparse.linalg.eigsh``) up to the 20-qubit cap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, NumericError
from .geometry import GeoRange, Lattice, is_geo_local
from .pauli import PauliString, PauliSum, apply_pauli, pauli_sparse

MAX_QUBITS = 20
DENSE_MAX = 12
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class Term:
    """One local term ``h_j(x_j) = sum_k x_j[k] * generators[k]``."""

    support: tuple[int, ...]
    params: tuple[int, ...]
    generators: tuple[PauliSum, ...]

    def __post_init__(self):
        if len(self.params) != len(self.generators):
            raise ValueError("one generator per parameter is required")
        if not 1 <= len(self.support) <= 4:
            raise ValueError("term support must have between 1 and 4 sites")
        sup = set(self.support)
        for g in self.generators:
            for P, _ in g:
                if not set(P.sites) <= sup:
                    raise ValueError(f"generator string {P} leaves term support {self.support}")


@dataclass
class ParamHamiltonian:
    lattice: Lattice
    terms: list[Term]
    range: GeoRange
    metadata: dict = field(default_factory=dict)
    _coord_mats: Optional[list] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        owner = {}
        for j, t in enumerate(self.terms):
            for c in t.params:
                if c in owner:
                    raise ValueError(f"coordinate {c} read by terms {owner[c]} and {j}")
                owner[c] = j
            if not is_geo_local(self.lattice, self.range, t.support):
                raise ValueError(f"term {j} support {t.support} exceeds range {self.range.per_axis}")
        if sorted(owner) != list(range(len(owner))):
            raise ValueError("parameter coordinates must be exactly 0..m-1")
        self._owner = [owner[c] for c in range(len(owner))]

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def m(self) -> int:
        return len(self._owner)

    def term_of(self, c: int) -> Term:
        """The term that reads coordinate ``c``."""
        return self.terms[self._owner[c]]

    def coordinate_generators(self) -> list[PauliSum]:
        gens = [None] * self.m
        for t in self.terms:
            for c, g in zip(t.params, t.generators):
                gens[c] = g
        return gens

    def coordinate_matrices(self) -> list[sp.csr_matrix]:
        if self._coord_mats is None:
            self._coord_mats = [g.to_sparse(self.n) for g in self.coordinate_generators()]
        return self._coord_mats


def build_heisenberg(lat: Lattice, normalized: bool = False) -> ParamHamiltonian:
    """``sum_<ij> J_ij (X_i X_j + Y_i Y_j + Z_i Z_j)``, one coupling per edge.

    With ``normalized=True`` each edge term is divided by 3 so that
    ``||h_j|| <= 1`` whenever ``|J_ij| <= 1``.
    """
    if lat.dims > 2:
        raise NotImplementedError("Heisenberg family is built for 1D and 2D lattices only")
    scale = 1.0 / 3.0 if normalized else 1.0
    terms = []
    for c, (i, j) in enumerate(lat.edges()):
        gen = PauliSum({PauliString(((i, p), (j, p))): scale for p in "XYZ"})
        terms.append(Term(support=(i, j), params=(c,), generators=(gen,)))
    meta = {"family": "heisenberg", "normalized": normalized, "coupling_range": [0.0, 2.0]}
    return ParamHamiltonian(lat, terms, GeoRange.uniform(lat, 2), meta)


def sample_instance(H: ParamHamiltonian, seed) -> np.ndarray:
    """Couplings drawn i.i.d. uniform on ``[0, 2]``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0, size=H.m)


def _check_x(H: ParamHamiltonian, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (H.m,):
        raise ValueError(f"parameter vector must have length {H.m}, got shape {x.shape}")
    return x


def assemble(H: ParamHamiltonian, x) -> sp.csr_matrix:
    if H.n > MAX_QUBITS:
        raise CapacityError(f"{H.n} qubits exceeds the exact-solver cap of {MAX_QUBITS}")
    x = _check_x(H, x)
    dim = 1 << H.n
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for xc, mat in zip(x, H.coordinate_matrices()):
        if xc != 0.0:
            out = out + xc * mat
    return out.tocsr()


@dataclass
class GroundStateResult:
    """Lowest eigenspace of ``H(x)``.

    ``vectors`` holds an orthonormal basis of the ground space as columns; the
    ground state is the uniform mixture over them. ``vectors is None`` marks
    the zero Hamiltonian above the dense cutoff (maximally mixed state).
    """

    energy: float
    vectors: Optional[np.ndarray]
    gap: float
    degenerate: bool
    n: int
    residual: float = 0.0

    @property
    def maximally_mixed(self) -> bool:
        return self.vectors is None or self.vectors.shape[1] == (1 << self.n)

    @property
    def state(self) -> np.ndarray:
        """The unique ground-state vector; raises when the ground space is degenerate."""
        if self.degenerate or self.vectors is None:
            raise ValueError("ground space is degenerate; use .vectors / density_matrix()")
        return self.vectors[:, 0]

    def density_matrix(self) -> np.ndarray:
        if self.vectors is None:
            return np.eye(1 << self.n) / (1 << self.n)
        V = self.vectors
        return V @ V.conj().T / V.shape[1]


def _lowest_levels(mat: sp.csr_matrix, n: int, k: int):
    dim = 1 << n
    if n <= DENSE_MAX:
        w, v = la.eigh(mat.toarray())
        return w, v
    k = min(k, dim - 2)
    try:
        w, v = spla.eigsh(mat, k=k, which="SA", tol=1e-12, maxiter=20 * dim)
    except spla.ArpackNoConvergence as exc:
        raise NumericError(f"Lanczos did not converge: {exc}") from exc
    order = np.argsort(w)
    return w[order], v[:, order]


def ground_state(H: ParamHamiltonian, x, k: int = 8) -> GroundStateResult:
    mat = assemble(H, x)
    n = H.n
    if mat.nnz == 0 or not np.any(mat.data):
        return GroundStateResult(0.0, None if n > DENSE_MAX else np.eye(1 << n, dtype=complex), 0.0, True, n)
    w, v = _lowest_levels(mat, n, k)
    e0 = float(w[0])
    tol = DEGENERACY_RTOL * max(1.0, abs(e0))
    g = int(np.sum(w - e0 <= tol))
    if n > DENSE_MAX and g == len(w):
        raise NumericError(f"ground space degeneracy exceeds the {len(w)} computed Lanczos vectors")
    V = v[:, :g]
    if n <= DENSE_MAX:
        hnorm = max(abs(w[0]), abs(w[-1]))
    else:
        hnorm = spla.norm(mat, 1)  # upper bound on the spectral norm
    resid = float(np.max(np.linalg.norm(mat @ V - e0 * V, axis=0)))
    if resid > 1e-8 * max(hnorm, 1.0):
        raise NumericError(f"ground-state residual {resid:.3e} exceeds tolerance")
    gap = float(w[1] - w[0]) if len(w) > 1 else 0.0
    return GroundStateResult(e0, V, max(gap, 0.0), g > 1, n, resid)


def spectral_gap(H: ParamHamiltonian, x) -> float:
    if H.n > 16:
        raise CapacityError("spectral_gap is limited to 16 qubits")
    return ground_state(H, x).gap


def expectation(gs: GroundStateResult, O: PauliSum) -> float:
    """``Tr(O rho)`` for the (possibly mixed) ground state."""
    if O.max_site() >= gs.n:
        raise ValueError(f"observable acts on site {O.max_site()} of an {gs.n}-qubit state")
    total = 0.0
    if gs.maximally_mixed:
        return float(O.coefficient(PauliString()))
    V = gs.vectors
    for P, a in O:
        PV = apply_pauli(P, V, gs.n)
        val = np.einsum("ij,ij->", V.conj(), PV) / V.shape[1]
        total += a * val
    return float(np.real(total))


def correlation_observable(i: int, j: int) -> PauliSum:
    """``C_ij = (X_i X_j + Y_i Y_j + Z_i Z_j) / 3``."""
    if i == j:
        raise ValueError("correlation needs two distinct sites")
    return PauliSum({PauliString(((i, p), (j, p))): 1.0 / 3.0 for p in "XYZ"})


def restricted_couplings(x: Sequence[float], coords: Sequence[int], center: float = 1.0) -> np.ndarray:
    """Couplings with every coordinate outside ``coords`` reset to ``center``.

    The restriction map zeroes coordinates in the rescaled ``[-1, 1]`` space;
    with the affine rescale ``x -> x - 1`` that is ``J = 1`` in coupling space.
    """
    x = np.asarray(x, dtype=float)
    out = np.full_like(x, center)
    idx = np.asarray(list(coords), dtype=int)
    out[idx] = x[idx]
    return out

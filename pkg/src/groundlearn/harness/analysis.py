"""Post-hoc views of trained models and of the locality of ground-state expectations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import CapacityError
from ..features import IndicatorFeatureMap, RffMap, compute_IP, unrescale
from ..geometry import obs_distance
from ..hamiltonian import ParamHamiltonian, expectation, ground_state, restricted_couplings
from ..lasso import RegressionModel
from ..pauli import PauliString, PauliSum

FeatureMap = Union[RffMap, IndicatorFeatureMap]


def coupling_importance(model: RegressionModel, fm: FeatureMap, m: Optional[int] = None) -> np.ndarray:
    """Per-coordinate sum of ``|w_k|`` over the features that read that coordinate.

    For the Heisenberg family coordinate ``c`` is the coupling of edge ``c``.
    """
    m = fm.m if m is None else m
    out = np.zeros(m)
    idx, val = model.sparse_weights()
    for k, w in zip(idx, val):
        if isinstance(fm, RffMap):
            coords = fm.regions[fm.feature_region(int(k))]
        else:
            coords = fm.column_owner(int(k)).ip.coords
        out[list(coords)] += abs(w)
    return out


def importance_rows(H: ParamHamiltonian, importance: np.ndarray) -> list[list]:
    """``(edge, i, j, importance)`` rows for two-site terms."""
    rows = []
    for c in range(H.m):
        sup = H.term_of(c).support
        rows.append([c, sup[0], sup[-1], float(importance[c])])
    return rows


def near_far(H: ParamHamiltonian, importance: np.ndarray, target: Sequence[int], radius: float) -> tuple[float, float]:
    """Mean importance of coordinates whose term lies within ``radius`` of ``target``
    and of those farther away (``nan`` when a side is empty)."""
    d = np.array([obs_distance(H.lattice, H.term_of(c).support, target) for c in range(H.m)])
    near, far = importance[d <= radius], importance[d > radius]
    mean = lambda a: float(a.mean()) if len(a) else float("nan")  # noqa: E731
    return mean(near), mean(far)


@dataclass
class ProbeRow:
    delta1: float
    ip_size: int
    full: float
    restricted: float

    @property
    def err(self) -> float:
        return abs(self.full - self.restricted)


def locality_probe(H: ParamHamiltonian, P: Union[PauliString, PauliSum], couplings, delta1_grid: Sequence[float],
                   full_state=None) -> list[ProbeRow]:
    """``|Tr(P rho(x)) - Tr(P rho(chi_P(x)))|`` for each ``delta1``.

    ``couplings`` are raw values in ``[0, 2]``; the restriction resets every
    coupling outside ``I_P`` to the centre value 1.
    """
    if H.n > 14:
        raise CapacityError("locality_probe is limited to 14 qubits")
    O = P if isinstance(P, PauliSum) else PauliSum({P: 1.0})
    anchor = P if isinstance(P, PauliString) else _support_string(P)
    gs = full_state if full_state is not None else ground_state(H, couplings)
    ref = expectation(gs, O)
    rows = []
    cache: dict[tuple, float] = {}
    for d1 in delta1_grid:
        ip = compute_IP(H, H.lattice, anchor, d1)
        if ip.coords not in cache:
            xr = restricted_couplings(couplings, ip.coords)
            cache[ip.coords] = ref if len(ip.coords) == H.m else expectation(ground_state(H, xr), O)
        rows.append(ProbeRow(float(d1), len(ip), ref, cache[ip.coords]))
    return rows


def _support_string(O: PauliSum) -> PauliString:
    sites = sorted({s for P, _ in O for s in P.sites})
    return PauliString(tuple((s, "Z") for s in sites))


def indicator_weights(H: ParamHamiltonian, fm: IndicatorFeatureMap, O: PauliSum) -> RegressionModel:
    """The explicit weights ``w'_(x', P) = alpha_P Tr(P rho(chi_P(x')))``.

    Only strings with a nonzero coefficient in ``O`` carry weight; each of
    their cells gets the restricted ground-state value at its grid point.
    """
    cols, vals = [], []
    for e in fm.entries:
        a = O.coefficient(e.ip.pauli)
        if a == 0.0:
            continue
        single = PauliSum({e.ip.pauli: 1.0})
        for cell in range(e.grid.size):
            xprime = e.grid.decode(cell, fm.m)  # zero outside I_P
            gs = ground_state(H, unrescale(xprime))
            cols.append(e.offset + cell)
            vals.append(a * expectation(gs, single))
    order = np.argsort(cols)
    return RegressionModel(np.array(vals)[order], "explicit", {"delta1": fm.delta1, "delta2": fm.delta2},
                           columns=np.array(cols, dtype=np.int64)[order], dim=fm.m_phi,
                           fingerprint=fm.fingerprint())

"""Non-Hermitian generators for the single- and M-excitation sectors.

We store the generator ``G`` of ``da/dt = G @ a`` rather than the effective
Hamiltonian; the two are related by ``H_eff = 1j * G``. In the single-excitation
sector, with ``phi = k_s * r`` and ``gamma = gamma_L + gamma_R``::

    G[mu, mu] = -gamma / 2
    G[mu, nu] = -gamma_R * exp(-1j * (phi[mu] - phi[nu]))   for nu < mu
    G[mu, nu] = -gamma_L * exp(-1j * (phi[nu] - phi[mu]))   for nu > mu

Right-moving decay couples each atom to the ones to its right, so ``gamma_R``
fills the lower triangle. The M-excitation lift acts on hard-core bosons:
no site is doubly excited and no fermionic signs appear.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from os import PathLike

import numpy as np

from .geometry import LatticeGeometry


@dataclass(frozen=True)
class CouplingParams:
    gamma_L: float
    gamma_R: float

    def __post_init__(self):
        for name in ("gamma_L", "gamma_R"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.gamma_L + self.gamma_R <= 0:
            raise ValueError("total decay rate gamma_L + gamma_R must be positive")

    @classmethod
    def from_directionality(cls, D: float, gamma: float = 1.0) -> "CouplingParams":
        """Split ``gamma`` so that ``(gamma_R - gamma_L) / gamma == D``."""
        if not -1.0 <= D <= 1.0:
            raise ValueError(f"directionality D must lie in [-1, 1], got {D}")
        if gamma <= 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        return cls(gamma_L=gamma * (1 - D) / 2, gamma_R=gamma * (1 + D) / 2)

    @property
    def gamma(self) -> float:
        return self.gamma_L + self.gamma_R

    @property
    def D(self) -> float:
        return (self.gamma_R - self.gamma_L) / self.gamma

    def mirrored(self) -> "CouplingParams":
        return CouplingParams(gamma_L=self.gamma_R, gamma_R=self.gamma_L)


@dataclass(frozen=True, eq=False)
class SingleExcitationHamiltonian:
    matrix: np.ndarray
    lattice: LatticeGeometry | None = field(default=None, repr=False)
    coupling: CouplingParams | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def effective_hamiltonian(self) -> np.ndarray:
        return 1j * self.matrix


class FockBasis:
    """M-element subsets of the N sites, in lexicographic order.

    States are tuples of 0-based site indices. For ``M == 1`` the basis is the
    site basis in natural order.
    """

    def __init__(self, n_sites: int, excitations: int = 1):
        if n_sites < 1:
            raise ValueError(f"n_sites must be >= 1, got {n_sites}")
        if not 1 <= excitations <= n_sites:
            raise ValueError(f"excitation number must lie in [1, {n_sites}], got {excitations}")
        self.n_sites = int(n_sites)
        self.excitations = int(excitations)
        self.states: tuple[tuple[int, ...], ...] = tuple(
            combinations(range(self.n_sites), self.excitations)
        )
        self._index = {s: i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FockBasis)
            and other.n_sites == self.n_sites
            and other.excitations == self.excitations
        )

    def __hash__(self) -> int:
        return hash((self.n_sites, self.excitations))

    def __repr__(self) -> str:
        return f"FockBasis(n_sites={self.n_sites}, excitations={self.excitations})"

    def index(self, state) -> int:
        return self._index[tuple(sorted(state))]

    @cached_property
    def occupancy(self) -> np.ndarray:
        """Boolean ``(len(basis), n_sites)`` matrix; True where a site is excited."""
        occ = np.zeros((len(self), self.n_sites), dtype=bool)
        for i, s in enumerate(self.states):
            occ[i, list(s)] = True
        return occ

    def describe(self) -> dict:
        return {"n_sites": self.n_sites, "excitations": self.excitations, "dim": len(self)}


def _phase_differences(lattice: LatticeGeometry) -> np.ndarray:
    phi = lattice.phases
    return phi[:, None] - phi[None, :]


def build_single(lattice: LatticeGeometry, coupling: CouplingParams) -> SingleExcitationHamiltonian:
    n = lattice.n_atoms
    if n == 0:
        raise ValueError("lattice has no atoms")
    diff = _phase_differences(lattice)
    lower = np.tril(np.ones((n, n), dtype=bool), -1)
    upper = lower.T
    g = np.zeros((n, n), dtype=complex)
    g[lower] = -coupling.gamma_R * np.exp(-1j * diff[lower])
    # diff[upper] = phi_mu - phi_nu = -(phi_nu - phi_mu)
    g[upper] = -coupling.gamma_L * np.exp(1j * diff[upper])
    np.fill_diagonal(g, -coupling.gamma / 2)
    g.setflags(write=False)
    return SingleExcitationHamiltonian(g, lattice, coupling)


def build_multi(single: SingleExcitationHamiltonian | np.ndarray, basis: FockBasis) -> np.ndarray:
    """Lift the single-excitation generator to ``basis``.

    A hop ``nu -> mu`` connecting ``S`` to ``S - {nu} + {mu}`` carries
    ``single[mu, nu]``; diagonal entries are the sums of the occupied sites'
    single-atom terms.
    """
    g1 = np.asarray(getattr(single, "matrix", single))
    n = g1.shape[0]
    if basis.n_sites != n:
        raise ValueError(f"basis has {basis.n_sites} sites but generator has dimension {n}")
    if basis.excitations == 1:
        return g1.copy()

    dim = len(basis)
    out = np.zeros((dim, dim), dtype=complex)
    diag = np.diag(g1)
    for j, state in enumerate(basis.states):
        occupied = set(state)
        out[j, j] = diag[list(state)].sum()
        empty = [mu for mu in range(n) if mu not in occupied]
        for nu in state:
            rest = occupied - {nu}
            for mu in empty:
                out[basis.index(rest | {mu}), j] += g1[mu, nu]
    return out


def dissipator_matrix(lattice: LatticeGeometry, coupling: CouplingParams) -> np.ndarray:
    """Hermitian decay matrix ``gamma_L e^{+i dphi} + gamma_R e^{-i dphi}``.

    Equals ``-(G + G^dagger)`` for the generator from :func:`build_single`.
    """
    diff = _phase_differences(lattice)
    return coupling.gamma_L * np.exp(1j * diff) + coupling.gamma_R * np.exp(-1j * diff)


def write_matrix_csv(matrix: np.ndarray, path: str | PathLike) -> None:
    """Dump nonzero entries as ``row,col,re,im`` (0-based indices)."""
    m = np.asarray(matrix)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for r, c in zip(*np.nonzero(m)):
            v = m[r, c]
            w.writerow([r, c, repr(float(v.real)), repr(float(v.imag))])

"""Brute-force master-equation evolution on the full 2^N spin space.

Validation only. The generator is assembled term by term from pairwise sums
over atoms (coherent exchange ``H_L + H_R`` plus left/right collective
dissipators), independently of :mod:`chiraltrap.hamiltonian`. Phases use the
same sign convention as the amplitude equations there, so populations agree
exactly in the single-excitation sector.

Basis ordering: computational states are integers whose most significant bit
is site 1; bit value 1 means excited.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from os import PathLike

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .geometry import LatticeGeometry
from .hamiltonian import CouplingParams, FockBasis

MAX_ATOMS = 10
EXACT_MAX_ATOMS = 6


class OracleCapacityError(ValueError):
    pass


def lowering_operators(n: int) -> list[sp.csr_matrix]:
    """``sigma_mu = |g><e|`` on site ``mu`` (0-based), as sparse 2^n matrices."""
    lower = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    ops = []
    for mu in range(n):
        left = sp.identity(2**mu, format="csr")
        right = sp.identity(2 ** (n - mu - 1), format="csr")
        ops.append(sp.kron(sp.kron(left, lower), right, format="csr"))
    return ops


def excited_projector_diagonals(n: int) -> np.ndarray:
    """Row ``mu`` is the diagonal of ``|e><e|_mu``; shape ``(n, 2^n)``."""
    idx = np.arange(2**n)
    return np.array([(idx >> (n - 1 - mu)) & 1 for mu in range(n)], dtype=float)


@dataclass(eq=False)
class LindbladGenerator:
    """``d rho/dt = -i[H, rho] + sum_k gamma_k (c_k rho c_k^+ - {K_k, rho}/2)``."""

    n_atoms: int
    hamiltonian: sp.csr_matrix
    jumps: list[sp.csr_matrix]  # sqrt(rate) already folded in
    decay: sp.csr_matrix  # sum of rate * K_k

    @cached_property
    def no_jump(self) -> sp.csr_matrix:
        """``-i H - decay/2``: the conditional (no-jump) generator on the full space."""
        return (-1j * self.hamiltonian - 0.5 * self.decay).tocsr()

    @cached_property
    def superoperator(self) -> sp.csr_matrix:
        """Action on row-major ``rho.ravel()``; ``vec(A X B) = (A kron B^T) vec(X)``."""
        dim = 2**self.n_atoms
        eye = sp.identity(dim, format="csr")
        g = self.no_jump
        sup = sp.kron(g, eye) + sp.kron(eye, g.conj())
        for c in self.jumps:
            sup = sup + sp.kron(c, c.conj())
        return sup.tocsr()

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        g = self.no_jump
        out = g @ rho + (g @ rho.conj().T).conj().T
        for c in self.jumps:
            out = out + c @ (c @ rho.conj().T).conj().T
        return out


def lindblad_generator(lattice: LatticeGeometry, coupling: CouplingParams) -> LindbladGenerator:
    n = lattice.n_atoms
    if n > MAX_ATOMS:
        raise OracleCapacityError(f"oracle supports at most {MAX_ATOMS} atoms, got {n}")
    phi = lattice.phases
    sig = lowering_operators(n)
    dag = [s.conj().T.tocsr() for s in sig]
    dim = 2**n
    gl, gr = coupling.gamma_L, coupling.gamma_R

    h = sp.csr_matrix((dim, dim), dtype=complex)
    k_left = sp.csr_matrix((dim, dim), dtype=complex)
    k_right = sp.csr_matrix((dim, dim), dtype=complex)
    for mu in range(n):
        for nu in range(n):
            hop = dag[mu] @ sig[nu]
            k_left = k_left + np.exp(1j * (phi[mu] - phi[nu])) * hop
            k_right = k_right + np.exp(-1j * (phi[mu] - phi[nu])) * hop
            if mu < nu:
                term = np.exp(-1j * (phi[nu] - phi[mu])) * hop
                h = h - 0.5j * gl * (term - term.conj().T)
            elif mu > nu:
                term = np.exp(-1j * (phi[mu] - phi[nu])) * hop
                h = h - 0.5j * gr * (term - term.conj().T)

    # sum_{mu,nu} e^{+i(phi_mu - phi_nu)} sigma_nu rho sigma_mu^+ = c rho c^+ with
    # c = sum_nu e^{-i phi_nu} sigma_nu (and the conjugate phase for right-movers)
    c_left = sum(np.exp(-1j * phi[nu]) * sig[nu] for nu in range(n))
    c_right = sum(np.exp(1j * phi[nu]) * sig[nu] for nu in range(n))
    jumps = [np.sqrt(gl) * c_left.tocsr(), np.sqrt(gr) * c_right.tocsr()]
    decay = (gl * k_left + gr * k_right).tocsr()
    return LindbladGenerator(n, h.tocsr(), jumps, decay)


def embed_sector_state(vector, basis: FockBasis) -> np.ndarray:
    """Map amplitudes over ``basis`` to a full 2^N state vector."""
    n = basis.n_sites
    psi = np.zeros(2**n, dtype=complex)
    for amp, state in zip(np.asarray(vector), basis.states):
        psi[sum(1 << (n - 1 - mu) for mu in state)] = amp
    return psi


def sector_block(op, basis: FockBasis) -> np.ndarray:
    """Restrict a full-space operator to ``basis`` (FockBasis ordering)."""
    n = basis.n_sites
    idx = [sum(1 << (n - 1 - mu) for mu in s) for s in basis.states]
    dense = op.toarray() if sp.issparse(op) else np.asarray(op)
    return dense[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class DensityTrace:
    times: np.ndarray
    rhos: np.ndarray  # (T, 2^N, 2^N)
    solver: str


def evolve_density(
    generator: LindbladGenerator, rho0: np.ndarray, times, *, method: str = "auto"
) -> DensityTrace:
    """Evolve ``rho0`` on ``times`` (starting at 0).

    ``"exact"`` applies ``exp(t L)`` to the vectorized state with the sparse
    superoperator (default up to 6 atoms); ``"ode"`` integrates the matrix
    equation with DOP853 at tight tolerance.
    """
    t = np.asarray(times, dtype=float)
    if t[0] != 0 or np.any(np.diff(t) <= 0):
        raise ValueError("times must start at 0 and increase strictly")
    dim = 2**generator.n_atoms
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 must be {dim}x{dim}")
    if method == "auto":
        method = "exact" if generator.n_atoms <= EXACT_MAX_ATOMS else "ode"

    if method == "exact":
        sup = generator.superoperator
        steps = np.diff(t)
        if t.size > 2 and np.allclose(steps, steps[0], rtol=1e-12, atol=0):
            vecs = expm_multiply(sup, rho0.ravel(), start=0.0, stop=t[-1], num=t.size, endpoint=True)
        else:
            vecs = [rho0.ravel()]
            for dt in steps:
                vecs.append(expm_multiply(dt * sup, vecs[-1]))
            vecs = np.array(vecs)
        rhos = np.asarray(vecs).reshape(t.size, dim, dim)
    elif method == "ode":
        def f(_t, y):
            return generator.rhs(y.reshape(dim, dim)).ravel()

        sol = solve_ivp(f, (0.0, t[-1]), rho0.ravel(), method="DOP853", t_eval=t, rtol=1e-10, atol=1e-12)
        if not sol.success:
            raise RuntimeError(f"oracle integration failed: {sol.message}")
        rhos = sol.y.T.reshape(t.size, dim, dim)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DensityTrace(t, rhos, method)


def oracle_site_populations(rhos: np.ndarray) -> np.ndarray:
    """``Tr(rho |e><e|_n)`` for one density matrix or a stack of them."""
    rhos = np.asarray(rhos)
    dim = rhos.shape[-1]
    n = dim.bit_length() - 1
    diag = np.real(np.diagonal(rhos, axis1=-2, axis2=-1))
    return diag @ excited_projector_diagonals(n).T


def write_density_trace_csv(trace: DensityTrace, path: str | PathLike) -> None:
    pops = oracle_site_populations(trace.rhos)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site", "population"])
        for t, row in zip(trace.times, pops):
            for site, p in enumerate(row, start=1):
                w.writerow([repr(float(t)), site, repr(float(p))])

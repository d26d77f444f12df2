"""Liouvillian construction, steady-state solve, time evolution and observables.

The master equation drho/dt = -i[H, rho] + sum_k (r_k/2)(2 s rho s+ - s+s rho
- rho s+s) is vectorized by column stacking, under which rho -> A rho B maps
to (B^T kron A) vec(rho). The generator is assembled sparse: the steady-state
solve replaces one row with the trace constraint and factorizes once per
parameter point, which is what makes dense parameter sweeps affordable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NoUniqueSteadyStateError, UndefinedCorrelationError
from .fock import HilbertSpec, Operator, destroy_matrix, embed
from .model import CollapseChannel

__all__ = [
    "DensityMatrix",
    "Superoperator",
    "build_liouvillian",
    "solve_steady",
    "steady_state_svd",
    "evolve",
    "default_dt",
    "g2_zero",
    "occupation",
    "vacuum_density",
    "trace_distance",
    "steady_residual",
]

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
EIG_TOL = -1e-8

# relative max-norm residual allowed for a steady-state solve
RESIDUAL_TOL = 1e-8

MAX_STEPS = 10**8


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, positive within tolerance."""

    space: HilbertSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex, order="C", copy=True)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match space dimension {d}")
        herm = np.abs(mat - mat.conj().T).max()
        if herm > HERM_TOL:
            raise ValueError(f"density matrix not Hermitian: max asymmetry {herm:.3e}")
        tr = np.trace(mat)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} deviates from 1 beyond {TRACE_TOL}")
        lam_min = float(np.linalg.eigvalsh(0.5 * (mat + mat.conj().T)).min())
        if lam_min < EIG_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3e}")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Sparse D^2 x D^2 generator acting on column-stacked density matrices."""

    space: HilbertSpec
    matrix: sp.csr_matrix = field(repr=False)

    convention = "column-stacking"

    def __post_init__(self):
        d2 = self.space.dim ** 2
        mat = sp.csr_matrix(self.matrix, dtype=complex)
        if mat.shape != (d2, d2):
            raise ValueError(f"superoperator shape {mat.shape}, expected {(d2, d2)}")
        object.__setattr__(self, "matrix", mat)

    def max_entry(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(matrix, dtype=complex).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector, dtype=complex).reshape((dim, dim), order="F")


def build_liouvillian(h: Operator, channels: list[CollapseChannel]) -> Superoperator:
    """Assemble the master-equation generator for Hamiltonian h and loss channels."""
    hm = h.matrix
    herm = np.abs(hm - hm.conj().T).max()
    if herm > HERM_TOL:
        raise ValueError(f"Hamiltonian not Hermitian (max asymmetry {herm:.3e})")
    d = h.space.dim
    eye = sp.identity(d, format="csr", dtype=complex)
    hs = sp.csr_matrix(hm)
    lv = -1j * (sp.kron(eye, hs, format="csr") - sp.kron(hs.T, eye, format="csr"))
    for ch in channels:
        if ch.operator.space != h.space:
            raise ValueError("collapse channel lives on a different space than H")
        if ch.rate == 0:
            continue
        s = sp.csr_matrix(ch.operator.matrix)
        sds = sp.csr_matrix(ch.operator.matrix.conj().T @ ch.operator.matrix)
        lv = lv + (ch.rate / 2.0) * (
            2.0 * sp.kron(s.conj(), s, format="csr")
            - sp.kron(eye, sds, format="csr")
            - sp.kron(sds.T, eye, format="csr")
        )
    return Superoperator(h.space, sp.csr_matrix(lv))


def _trace_constrained(lv: Superoperator) -> tuple[sp.csc_matrix, np.ndarray]:
    """Replace row 0 of L with the trace row; right-hand side picks trace = 1."""
    d = lv.space.dim
    co = lv.matrix.tocoo()
    keep = co.row != 0
    rows = np.concatenate([co.row[keep], np.zeros(d, dtype=co.row.dtype)])
    cols = np.concatenate([co.col[keep], np.arange(d) * (d + 1)])
    data = np.concatenate([co.data[keep], np.ones(d, dtype=complex)])
    a = sp.csc_matrix((data, (rows, cols)), shape=lv.matrix.shape)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    return a, b


def solve_steady(lv: Superoperator) -> DensityMatrix:
    """Steady state via trace-constrained sparse LU with iterative refinement.

    The two-excitation sector can sit seventeen orders of magnitude below the
    vacuum population at weak drive; the refinement steps are what keep those
    components accurate enough for correlation functions.
    """
    d = lv.space.dim
    a, b = _trace_constrained(lv)
    try:
        lu = spla.splu(a)
        x = lu.solve(b)
        for _ in range(2):
            x = x + lu.solve(b - a @ x)
    except (RuntimeError, ValueError) as exc:
        raise NoUniqueSteadyStateError(f"trace-constrained solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise NoUniqueSteadyStateError("trace-constrained solve produced non-finite values")
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-6:
        raise NoUniqueSteadyStateError(f"steady-state candidate has near-zero trace {tr:.3e}")
    rho = rho / tr
    scale = lv.max_entry()
    residual = float(np.abs(lv.matrix @ vec(rho)).max())
    if residual > RESIDUAL_TOL * max(scale, 1.0):
        raise NoUniqueSteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e} * |L|max"
        )
    return DensityMatrix(lv.space, rho)


def steady_state_svd(lv: Superoperator) -> DensityMatrix:
    """Validation oracle: null vector from a dense SVD. Small spaces only."""
    d = lv.space.dim
    dense = lv.matrix.toarray()
    _, _, vh = np.linalg.svd(dense)
    rho = unvec(vh[-1].conj(), d)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-10:
        raise NoUniqueSteadyStateError("null vector is traceless; steady state not unique")
    return DensityMatrix(lv.space, rho / tr)


def steady_residual(lv: Superoperator, rho: DensityMatrix) -> float:
    """Relative max-norm Liouvillian residual of a candidate steady state."""
    return float(np.abs(lv.matrix @ vec(rho.matrix)).max()) / max(lv.max_entry(), 1.0)


def default_dt(lv: Superoperator) -> float:
    """Conservative fixed step: 1e-2 over the largest generator diagonal."""
    diag = np.abs(lv.matrix.diagonal())
    return 1e-2 / max(1.0, float(diag.max()) if diag.size else 1.0)


def evolve(rho0: DensityMatrix, lv: Superoperator, t_final: float, dt: float) -> DensityMatrix:
    """Fixed-step 4th-order integration of dvec(rho)/dt = L vec(rho)."""
    if rho0.space != lv.space:
        raise ValueError("initial state and generator live on different spaces")
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    if t_final == 0:
        return rho0
    n_steps = math.ceil(t_final / dt - 1e-12)
    if n_steps > MAX_STEPS:
        raise ValueError(f"step count {n_steps} exceeds limit {MAX_STEPS}")
    h = t_final / n_steps
    a = lv.matrix
    v = vec(rho0.matrix)
    for _ in range(n_steps):
        k1 = a @ v
        k2 = a @ (v + (0.5 * h) * k1)
        k3 = a @ (v + (0.5 * h) * k2)
        k4 = a @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    d = lv.space.dim
    rho = unvec(v, d)
    rho = 0.5 * (rho + rho.conj().T)
    drift = abs(np.trace(rho).real - 1.0)
    if drift > 1e-8:
        raise RuntimeError(
            f"trace drift {drift:.3e} after {n_steps} steps; decrease dt (integration unstable)"
        )
    return DensityMatrix(lv.space, rho / np.trace(rho).real)


def _mode_ladder(space: HilbertSpec, mode_label: str) -> np.ndarray:
    cut = space.cutoff(mode_label)
    single = Operator(HilbertSpec(((mode_label, cut),)), destroy_matrix(cut))
    return embed(single, mode_label, space).matrix


def occupation(rho: DensityMatrix, mode_label: str) -> float:
    """<n> for one mode of the composite state."""
    s = _mode_ladder(rho.space, mode_label)
    val = complex(np.einsum("ij,ji->", s.conj().T @ s, rho.matrix))
    return float(val.real)


def g2_zero(rho: DensityMatrix, mode_label: str) -> float:
    """Equal-time second-order correlation <s+ s+ s s>/<s+ s>^2 for one mode."""
    s = _mode_ladder(rho.space, mode_label)
    n_val = float(np.einsum("ij,ji->", s.conj().T @ s, rho.matrix).real)
    if n_val <= 1e-14:
        raise UndefinedCorrelationError(
            f"mode {mode_label!r} occupation {n_val:.3e} too small for g2(0)"
        )
    s2 = s @ s
    num = float(np.einsum("ij,ji->", s2.conj().T @ s2, rho.matrix).real)
    return max(num, 0.0) / n_val**2


def vacuum_density(space: HilbertSpec) -> DensityMatrix:
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    mat[0, 0] = 1.0
    return DensityMatrix(space, mat)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the trace norm of the difference."""
    if rho.space != sigma.space:
        raise ValueError("states live on different spaces")
    diff = rho.matrix - sigma.matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())

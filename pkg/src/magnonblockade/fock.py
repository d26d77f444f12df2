"""Truncated bosonic Fock-space linear algebra.

Dense complex matrices on composite truncated Fock spaces: single-mode ladder
operators, tensor embedding into multi-mode spaces, and trace expectation
values. The product basis enumerates the last listed mode fastest, so for
modes [("p", Np), ("m", Nm)] the state |n_p, n_m> sits at index n_p*Nm + n_m
and embedding follows the same Kronecker order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HilbertSpec",
    "Operator",
    "Ket",
    "ladder_ops",
    "embed",
    "expectation",
    "basis_ket",
    "vacuum_ket",
    "destroy_matrix",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, order="C", copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class HilbertSpec:
    """Composite truncated Fock space: an ordered list of (label, cutoff) modes."""

    modes: tuple[tuple[str, int], ...]

    def __post_init__(self):
        modes = tuple((str(lbl), int(cut)) for lbl, cut in self.modes)
        object.__setattr__(self, "modes", modes)
        if not modes:
            raise ValueError("HilbertSpec needs at least one mode")
        labels = [lbl for lbl, _ in modes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"mode labels must be unique, got {labels}")
        for lbl, cut in modes:
            if cut < 2:
                raise ValueError(f"cutoff for mode {lbl!r} must be >= 2, got {cut}")

    @property
    def dim(self) -> int:
        return math.prod(cut for _, cut in self.modes)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.modes)

    def cutoff(self, label: str) -> int:
        for lbl, cut in self.modes:
            if lbl == label:
                return cut
        raise ValueError(f"unknown mode label {label!r} in space {self.labels}")

    def index(self, occupations) -> int:
        """Flat basis index of the product state with the given occupations."""
        occupations = tuple(occupations)
        if len(occupations) != len(self.modes):
            raise ValueError(
                f"expected {len(self.modes)} occupation numbers, got {len(occupations)}"
            )
        idx = 0
        for (lbl, cut), n in zip(self.modes, occupations):
            if not 0 <= n < cut:
                raise ValueError(f"occupation {n} out of range for mode {lbl!r} (cutoff {cut})")
            idx = idx * cut + n
        return idx


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex operator on a composite Fock space."""

    space: HilbertSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = _freeze(self.matrix)
        d = self.space.dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match space dimension {d}")
        object.__setattr__(self, "matrix", mat)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)


@dataclass(frozen=True, eq=False)
class Ket:
    """State vector on a composite Fock space.

    Norm 1 is not enforced: non-Hermitian evolution legitimately produces
    sub-normalized kets.
    """

    space: HilbertSpec
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = _freeze(np.asarray(self.amplitudes).reshape(-1))
        if amp.shape != (self.space.dim,):
            raise ValueError(
                f"amplitude length {amp.shape[0]} does not match space dimension {self.space.dim}"
            )
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def destroy_matrix(cutoff: int) -> np.ndarray:
    """Raw annihilation matrix a[n-1, n] = sqrt(n) on a single truncated mode."""
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def ladder_ops(cutoff: int, label: str = "mode") -> tuple[Operator, Operator, Operator]:
    """Annihilation, creation and number operators on one truncated mode."""
    a = destroy_matrix(cutoff)
    space = HilbertSpec(((label, cutoff),))
    return (
        Operator(space, a),
        Operator(space, a.conj().T),
        Operator(space, np.diag(np.arange(cutoff, dtype=float)).astype(complex)),
    )


def embed(op: Operator, mode_label: str, space: HilbertSpec) -> Operator:
    """Lift a single-mode operator into `space` by tensoring identities around it."""
    cut = space.cutoff(mode_label)
    if op.matrix.shape != (cut, cut):
        raise ValueError(
            f"operator dimension {op.matrix.shape[0]} does not match cutoff {cut} "
            f"of mode {mode_label!r}"
        )
    out = np.eye(1, dtype=complex)
    for lbl, c in space.modes:
        out = np.kron(out, op.matrix if lbl == mode_label else np.eye(c, dtype=complex))
    return Operator(space, out)


def expectation(op: Operator, rho) -> complex:
    """Tr(op . rho) for a density matrix on the same space."""
    if rho.space != op.space:
        raise ValueError(
            f"space mismatch: operator on {op.space.modes}, state on {rho.space.modes}"
        )
    # Tr(AB) without forming the product
    return complex(np.einsum("ij,ji->", op.matrix, rho.matrix))


def basis_ket(space: HilbertSpec, occupations) -> Ket:
    amp = np.zeros(space.dim, dtype=complex)
    amp[space.index(occupations)] = 1.0
    return Ket(space, amp)


def vacuum_ket(space: HilbertSpec) -> Ket:
    return basis_ket(space, (0,) * len(space.modes))

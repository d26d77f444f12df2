"""Model parameters and Hamiltonian builders.

Two levels of description of the same device, both in a frame rotating at the
drive and in units of the pump decay rate kappa:

* the full three-mode model: pump cavity "p", signal cavity "s" and magnon
  mode "m", with a pair-conversion coupling J between the cavities, a beam
  splitter coupling g_ms between signal and magnon, and a two-photon drive F
  on the pump;
* the effective two-mode model obtained by adiabatically eliminating the far
  detuned signal cavity, which leaves a pump Kerr term chi, a direct
  pump-pair <-> magnon exchange g and a shifted magnon detuning.

The sign of the signal detuning delta_s flips the signs of both chi and g in
the reduction; that sign flip is the nonreciprocity control of this model.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .fock import HilbertSpec, Operator, destroy_matrix, embed

__all__ = [
    "EffectiveParams",
    "FullModelParams",
    "CollapseChannel",
    "reduce_to_effective",
    "build_h_eff",
    "build_h_nonhermitian",
    "build_h_full",
    "collapse_channels",
    "flip_direction",
    "effective_space",
    "full_space",
    "DEFAULT_EFFECTIVE_CUTOFFS",
    "DEFAULT_FULL_CUTOFFS",
]

# weak drive (F = 0.05) keeps occupations far below these
DEFAULT_EFFECTIVE_CUTOFFS = (12, 6)
DEFAULT_FULL_CUTOFFS = (8, 4, 4)

# cosmetic unit tag only; all computations use kappa = 1
KAPPA_MHZ_DEFAULT = 2.0


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the reduced pump+magnon model, in units of kappa."""

    delta_p: float
    delta_m: float
    chi: float
    g: float
    F: float
    gamma: float
    kappa: float = 1.0
    kappa_mhz: float = KAPPA_MHZ_DEFAULT

    def __post_init__(self):
        for name in ("delta_p", "delta_m", "chi", "g", "F", "gamma", "kappa", "kappa_mhz"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.F < 0:
            raise ValueError(f"F must be >= 0, got {self.F}")


@dataclass(frozen=True)
class FullModelParams:
    """Parameters of the three-mode model, in units of kappa.

    The detunings may be given directly or derived from a lab-frame block of
    angular frequencies (omega_p, omega_s, omega_m, omega_d); when the block
    is present the detunings must equal the exact frame differences.
    """

    delta_p: float
    delta_s: float
    delta_m_tilde: float
    g_ms: float
    J: float
    F: float
    gamma: float
    kappa: float = 1.0
    kappa_s: float = 0.0
    lab_frame: tuple[float, float, float, float] | None = None  # (omega_p, omega_s, omega_m, omega_d)
    kappa_mhz: float = KAPPA_MHZ_DEFAULT

    def __post_init__(self):
        for name in ("delta_p", "delta_s", "delta_m_tilde", "g_ms", "J", "F",
                     "gamma", "kappa", "kappa_s", "kappa_mhz"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.F < 0:
            raise ValueError(f"F must be >= 0, got {self.F}")
        if self.kappa_s < 0:
            raise ValueError(f"kappa_s must be >= 0, got {self.kappa_s}")
        if self.lab_frame is not None:
            omega_p, omega_s, omega_m, omega_d = (float(w) for w in self.lab_frame)
            object.__setattr__(self, "lab_frame", (omega_p, omega_s, omega_m, omega_d))
            expected = (omega_p - omega_d / 2, omega_s - omega_d, omega_m - omega_d)
            got = (self.delta_p, self.delta_s, self.delta_m_tilde)
            if got != expected:
                raise ValueError(
                    f"detunings {got} inconsistent with lab-frame block (expected {expected})"
                )

    @classmethod
    def from_lab_frame(cls, omega_p: float, omega_s: float, omega_m: float,
                       omega_d: float, **kwargs) -> "FullModelParams":
        return cls(
            delta_p=omega_p - omega_d / 2,
            delta_s=omega_s - omega_d,
            delta_m_tilde=omega_m - omega_d,
            lab_frame=(omega_p, omega_s, omega_m, omega_d),
            **kwargs,
        )


@dataclass(frozen=True, eq=False)
class CollapseChannel:
    """A loss channel (sigma, rate): contributes (rate/2)(2 s rho s+ - s+s rho - rho s+s)."""

    operator: Operator
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "rate", float(self.rate))
        if self.rate < 0:
            raise ValueError(f"collapse rate must be >= 0, got {self.rate}")


# threshold for the dispersive validity warning |delta_s| >= 10 max(|g_ms|, |J|)
DISPERSIVE_RATIO = 10.0


def reduce_to_effective(full: FullModelParams) -> EffectiveParams:
    """Adiabatic elimination of the signal cavity.

    delta_m = delta_m_tilde - g_ms^2/delta_s, g = -g_ms*J/delta_s,
    chi = -J^2/delta_s. Warns (does not fail) when the dispersive condition
    |delta_s| >= 10*max(|g_ms|, |J|) is violated.
    """
    if full.delta_s == 0:
        raise ZeroDivisionError("reduction undefined for delta_s = 0")
    scale = max(abs(full.g_ms), abs(full.J))
    if scale > 0 and abs(full.delta_s) < DISPERSIVE_RATIO * scale:
        warnings.warn(
            f"dispersive reduction marginal: |delta_s|/max(|g_ms|,|J|) = "
            f"{abs(full.delta_s) / scale:.3g} < {DISPERSIVE_RATIO}",
            stacklevel=2,
        )
    return EffectiveParams(
        delta_p=full.delta_p,
        delta_m=full.delta_m_tilde - full.g_ms**2 / full.delta_s,
        chi=-full.J**2 / full.delta_s,
        g=-full.g_ms * full.J / full.delta_s,
        F=full.F,
        gamma=full.gamma,
        kappa=full.kappa,
        kappa_mhz=full.kappa_mhz,
    )


def effective_space(cutoff_p: int = DEFAULT_EFFECTIVE_CUTOFFS[0],
                    cutoff_m: int = DEFAULT_EFFECTIVE_CUTOFFS[1]) -> HilbertSpec:
    return HilbertSpec((("p", cutoff_p), ("m", cutoff_m)))


def full_space(cutoff_p: int = DEFAULT_FULL_CUTOFFS[0],
               cutoff_s: int = DEFAULT_FULL_CUTOFFS[1],
               cutoff_m: int = DEFAULT_FULL_CUTOFFS[2]) -> HilbertSpec:
    return HilbertSpec((("p", cutoff_p), ("s", cutoff_s), ("m", cutoff_m)))


def _check_modes(space: HilbertSpec, expected: tuple[str, ...]):
    if space.labels != expected:
        raise ValueError(f"space must have modes {expected} in order, got {space.labels}")


def _embedded(space: HilbertSpec) -> dict[str, np.ndarray]:
    """Embedded annihilation matrices keyed by mode label."""
    ops = {}
    for lbl, cut in space.modes:
        single = Operator(HilbertSpec(((lbl, cut),)), destroy_matrix(cut))
        ops[lbl] = embed(single, lbl, space).matrix
    return ops


def build_h_eff(params: EffectiveParams, space: HilbertSpec) -> Operator:
    """Two-mode Hamiltonian: detunings + pump Kerr + pair exchange + two-photon drive."""
    _check_modes(space, ("p", "m"))
    ops = _embedded(space)
    ap, m = ops["p"], ops["m"]
    ap2 = ap @ ap
    apd = ap.conj().T
    md = m.conj().T
    h = (
        params.delta_p * (apd @ ap)
        + params.delta_m * (md @ m)
        + params.chi * (apd @ apd @ ap2)
        + params.g * (ap2.conj().T @ m + ap2 @ md)
        + params.F * (ap2 + ap2.conj().T)
    )
    return Operator(space, h)


def build_h_nonhermitian(params: EffectiveParams, space: HilbertSpec) -> Operator:
    """build_h_eff with the decay terms -i(kappa/2) n_p - i(gamma/2) n_m added."""
    _check_modes(space, ("p", "m"))
    ops = _embedded(space)
    ap, m = ops["p"], ops["m"]
    h = build_h_eff(params, space).matrix.copy()
    h -= 0.5j * params.kappa * (ap.conj().T @ ap)
    h -= 0.5j * params.gamma * (m.conj().T @ m)
    return Operator(space, h)


def build_h_full(full: FullModelParams, space: HilbertSpec) -> Operator:
    """Three-mode Hamiltonian with pair conversion J and magnon-signal exchange g_ms."""
    _check_modes(space, ("p", "s", "m"))
    ops = _embedded(space)
    ap, a_s, m = ops["p"], ops["s"], ops["m"]
    ap2 = ap @ ap
    h = (
        full.delta_p * (ap.conj().T @ ap)
        + full.delta_s * (a_s.conj().T @ a_s)
        + full.delta_m_tilde * (m.conj().T @ m)
        + full.J * (ap2 @ a_s.conj().T + ap2.conj().T @ a_s)
        + full.g_ms * (a_s @ m.conj().T + a_s.conj().T @ m)
        + full.F * (ap2 + ap2.conj().T)
    )
    return Operator(space, h)


def collapse_channels(params, space: HilbertSpec) -> list[CollapseChannel]:
    """Loss channels for either parameter set on the matching space."""
    ops = _embedded(space)
    if isinstance(params, EffectiveParams):
        _check_modes(space, ("p", "m"))
        return [
            CollapseChannel(Operator(space, ops["p"]), params.kappa),
            CollapseChannel(Operator(space, ops["m"]), params.gamma),
        ]
    if isinstance(params, FullModelParams):
        _check_modes(space, ("p", "s", "m"))
        channels = [CollapseChannel(Operator(space, ops["p"]), params.kappa)]
        if params.kappa_s > 0:
            channels.append(CollapseChannel(Operator(space, ops["s"]), params.kappa_s))
        channels.append(CollapseChannel(Operator(space, ops["m"]), params.gamma))
        return channels
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def flip_direction(params: EffectiveParams) -> EffectiveParams:
    """Reverse the propagation direction: delta_s sign flip negates chi and g."""
    return replace(params, chi=-params.chi, g=-params.g)

"""Weak-drive amplitude dynamics and closed-form blockade conditions.

Restricting the two-mode model to the six states reachable at second order
from vacuum under a pair drive, |0,0>, |2,0>, |0,1>, |4,0>, |2,1>, |0,2>,
gives a small non-Hermitian Schrodinger problem for the amplitudes. In the
limit where detunings dominate the decay rates, the steady amplitudes and the
magnon correlation have closed forms controlled by three factors:

    x = 6*chi + 2*delta_p + 3*delta_m        (two-path interference factor)
    y = g^2 - (chi + delta_p)*delta_m        (single-excitation response)
    z = -delta_m*(3*chi + delta_p)*(2*chi + 2*delta_p + delta_m)

g2 = x^2 y^2 / (z + g^2 x)^2. The x = 0 root is the interference-induced
blockade (independent of g); the y = 0 root is the anharmonicity-induced one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AnalyticPoleError, SingularConditionError
from .model import EffectiveParams

__all__ = [
    "AmplitudeSet",
    "ConditionRoots",
    "CorrelationFactors",
    "correlation_factors",
    "amplitude_derivative",
    "evolve_amplitudes",
    "steady_amplitudes",
    "g2_analytic",
    "optimal_deltas",
]

SQRT2 = math.sqrt(2.0)
SQRT12 = math.sqrt(12.0)


@dataclass(frozen=True)
class AmplitudeSet:
    """Amplitudes of |0,0>, |2,0>, |0,1>, |4,0>, |2,1>, |0,2>."""

    c00: complex
    c20: complex
    c01: complex
    c40: complex
    c21: complex
    c02: complex

    def __post_init__(self):
        for name in ("c00", "c20", "c01", "c40", "c21", "c02"):
            val = complex(getattr(self, name))
            if not (math.isfinite(val.real) and math.isfinite(val.imag)):
                raise ValueError(f"amplitude {name} must be finite, got {val}")
            object.__setattr__(self, name, val)

    def as_array(self) -> np.ndarray:
        return np.array([self.c00, self.c20, self.c01, self.c40, self.c21, self.c02])

    @classmethod
    def from_array(cls, arr) -> "AmplitudeSet":
        return cls(*arr)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


class CorrelationFactors(NamedTuple):
    x: float
    y: float
    z: float


class ConditionRoots(NamedTuple):
    """delta_p roots of the two blockade conditions; cmb is None when delta_m = 0."""

    umb_delta_p: float
    cmb_delta_p: float | None


def correlation_factors(params: EffectiveParams) -> CorrelationFactors:
    dp, dm, chi, g = params.delta_p, params.delta_m, params.chi, params.g
    return CorrelationFactors(
        x=6 * chi + 2 * dp + 3 * dm,
        y=g * g - (chi + dp) * dm,
        z=-dm * (3 * chi + dp) * (2 * chi + 2 * dp + dm),
    )


def amplitude_derivative(state: AmplitudeSet, params: EffectiveParams) -> AmplitudeSet:
    """Right-hand side dC/dt of the restricted non-Hermitian dynamics."""
    dp, dm, chi = params.delta_p, params.delta_m, params.chi
    g, f = params.g, params.F
    kap, gam = params.kappa, params.gamma
    c00, c20, c01, c40, c21, c02 = state.as_array()

    i_dc00 = SQRT2 * f * c20
    i_dc20 = (2 * dp + 2 * chi - 1j * kap) * c20 + SQRT2 * f * c00 + SQRT2 * g * c01 + SQRT12 * f * c40
    i_dc01 = (dm - 0.5j * gam) * c01 + SQRT2 * g * c20 + SQRT2 * f * c21
    i_dc40 = (4 * dp + 12 * chi - 2j * kap) * c40 + SQRT12 * g * c21 + SQRT12 * f * c20
    i_dc21 = (2 * dp + 2 * chi + dm - 1j * (kap + 0.5 * gam)) * c21 + SQRT12 * g * c40 + 2 * g * c02 + SQRT2 * f * c01
    i_dc02 = (2 * dm - 1j * gam) * c02 + 2 * g * c21

    return AmplitudeSet.from_array(
        -1j * np.array([i_dc00, i_dc20, i_dc01, i_dc40, i_dc21, i_dc02])
    )


def evolve_amplitudes(initial: AmplitudeSet, params: EffectiveParams,
                      t_final: float, dt: float) -> AmplitudeSet:
    """Fixed-step 4th-order integration; the total norm must not grow."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_final < 0:
        raise ValueError(f"t_final must be >= 0, got {t_final}")
    if t_final == 0:
        return initial
    n_steps = math.ceil(t_final / dt - 1e-12)
    if n_steps > 10**8:
        raise ValueError(f"step count {n_steps} exceeds limit")
    h = t_final / n_steps

    def rhs(arr):
        return amplitude_derivative(AmplitudeSet.from_array(arr), params).as_array()

    c = initial.as_array()
    norm = float(np.linalg.norm(c))
    for _ in range(n_steps):
        k1 = rhs(c)
        k2 = rhs(c + 0.5 * h * k1)
        k3 = rhs(c + 0.5 * h * k2)
        k4 = rhs(c + h * k3)
        c = c + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        new_norm = float(np.linalg.norm(c))
        if new_norm > norm * (1 + 1e-9) + 1e-15:
            raise RuntimeError(
                f"amplitude norm grew from {norm:.6e} to {new_norm:.6e}; decrease dt"
            )
        norm = new_norm
    return AmplitudeSet.from_array(c)


def steady_amplitudes(params: EffectiveParams) -> AmplitudeSet:
    """Closed-form steady amplitudes in the detuning-dominated limit (decay ignored)."""
    dp, dm, chi = params.delta_p, params.delta_m, params.chi
    g, f = params.g, params.F
    x, y, z = correlation_factors(params)
    if y == 0:
        raise SingularConditionError("Y")
    den = z + g * g * x
    if den == 0:
        raise SingularConditionError("Z+g^2*X")

    c01 = -g * f / y
    c21 = -g * f * f * dm * x / (SQRT2 * y * den)
    c02 = g * g * f * f * x / (SQRT2 * y * den)

    if g != 0:
        c20 = -dm * c01 / (SQRT2 * g)
    else:
        if dp + chi == 0:
            raise SingularConditionError("delta_p+chi")
        c20 = -f / (SQRT2 * (dp + chi))
    four_photon_det = 4 * dp + 12 * chi
    if four_photon_det == 0:
        raise SingularConditionError("4*delta_p+12*chi")
    c40 = -SQRT12 * (g * c21 + f * c20) / four_photon_det

    return AmplitudeSet(1.0, c20, c01, c40, c21, c02)


def g2_analytic(params: EffectiveParams) -> float:
    """Closed-form magnon correlation x^2 y^2 / (z + g^2 x)^2."""
    x, y, z = correlation_factors(params)
    den = z + params.g**2 * x
    if den == 0:
        raise AnalyticPoleError(
            f"correlation diverges: z + g^2*x = 0 at delta_p={params.delta_p}"
        )
    return (x * y / den) ** 2


def optimal_deltas(params: EffectiveParams, solve_for: str = "delta_p") -> ConditionRoots:
    """delta_p roots of x = 0 (interference) and y = 0 (anharmonicity)."""
    if solve_for != "delta_p":
        raise ValueError(f"only the delta_p axis is supported, got {solve_for!r}")
    umb = -(6 * params.chi + 3 * params.delta_m) / 2.0
    if params.delta_m == 0:
        return ConditionRoots(umb, None)
    cmb = params.g**2 / params.delta_m - params.chi
    return ConditionRoots(umb, cmb)

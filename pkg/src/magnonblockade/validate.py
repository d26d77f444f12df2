"""Cross-validation suite: oracles and consistency checks.

Every closed-form result in this package has an independent route that must
reproduce it: the steady amplitudes against a plain linear solve of the
restricted Hamiltonian block, the correlation formula against the amplitude
ratio, the steady-state factorization against time evolution, the default
truncation against larger cutoffs, and the reduced two-mode model against the
full three-mode dynamics.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import analytic, model, steadystate
from .analytic import AmplitudeSet
from .model import EffectiveParams, FullModelParams

__all__ = [
    "CheckResult",
    "ANSATZ_STATES",
    "ansatz_block",
    "steady_amplitude_oracle",
    "sample_params",
    "check_amplitude_oracle",
    "check_correlation_identity",
    "check_steady_vs_evolution",
    "check_truncation",
    "check_reduction",
    "run_all_checks",
    "SPOT_CHECK_POINTS",
]

ANSATZ_STATES = ((0, 0), (2, 0), (0, 1), (4, 0), (2, 1), (0, 2))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: dict
    detail: str = ""

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def ansatz_block(params: EffectiveParams, dissipative: bool = False) -> np.ndarray:
    """6x6 Hamiltonian matrix restricted to the weak-drive ansatz states."""
    space = model.effective_space(5, 3)
    build = model.build_h_nonhermitian if dissipative else model.build_h_eff
    h = build(params, space).matrix
    idx = [space.index(s) for s in ANSATZ_STATES]
    return h[np.ix_(idx, idx)]


def steady_amplitude_oracle(params: EffectiveParams) -> AmplitudeSet:
    """Brute-force weak-drive steady state: 5x5 linear solve, no closed forms.

    The block matrix comes straight from the Hamiltonian builder with the
    vacuum amplitude pinned to one. The only physics input is the weak-drive
    hierarchy: the drive does not feed doubly-excited amplitudes back into the
    singly-excited equations (those entries are two orders down in F).
    """
    block = ansatz_block(params)  # decay-free limit
    a = block[1:, 1:].astype(complex).copy()
    b = -block[1:, 0].astype(complex)
    a[0, 2] = 0.0  # drop F coupling c40 -> c20 equation
    a[1, 3] = 0.0  # drop F coupling c21 -> c01 equation
    x = np.linalg.solve(a, b)
    return AmplitudeSet(1.0, *x)


PARAM_RANGES = {
    "delta_p": (-20.0, 5.0),
    "delta_m": (2.0, 15.0),
    "chi": (-2.0, 2.0),
    "g": (0.1, 5.0),
    "F": (0.01, 0.1),
}

# margins below which a draw counts as too close to a singular denominator
_SINGULAR_MARGINS = {"Y": 0.1, "Z+g^2*X": 0.5, "4*delta_p+12*chi": 0.1}


def sample_params(rng: np.random.Generator, gamma: float = 0.5) -> EffectiveParams:
    """One random non-singular weak-drive parameter set."""
    while True:
        draw = {k: rng.uniform(*v) for k, v in PARAM_RANGES.items()}
        if rng.uniform() < 0.5:
            draw["g"] = -draw["g"]
        params = EffectiveParams(gamma=gamma, **draw)
        x, y, z = analytic.correlation_factors(params)
        margins = {
            "Y": abs(y),
            "Z+g^2*X": abs(z + params.g**2 * x),
            "4*delta_p+12*chi": abs(4 * params.delta_p + 12 * params.chi),
        }
        if all(margins[k] >= _SINGULAR_MARGINS[k] for k in margins):
            return params


def _rel_err(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def check_amplitude_oracle(seed: int = 12345, n_points: int = 100,
                           tol: float = 1e-9) -> CheckResult:
    """Closed-form steady amplitudes vs the 5x5 linear-system oracle."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        params = sample_params(rng)
        closed = analytic.steady_amplitudes(params).as_array()
        brute = steady_amplitude_oracle(params).as_array()
        worst = max(worst, max(_rel_err(c, b) for c, b in zip(closed, brute)))
    return CheckResult(
        "amplitude-oracle",
        worst <= tol,
        {"max_rel_err": worst, "n_points": n_points, "seed": seed},
        f"max relative deviation {worst:.3e} over {n_points} random points (tol {tol:.0e})",
    )


def check_correlation_identity(seed: int = 12345, n_points: int = 100, tol: float = 1e-9,
                               _kerr_sign: float = 1.0) -> CheckResult:
    """Closed-form correlation vs 2|c02|^2/|c01|^4 from the steady amplitudes.

    _kerr_sign is a test hook that mis-signs the Kerr coefficient on the
    amplitude route only; anything but +1 must make this check fail.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        params = sample_params(rng)
        direct = analytic.g2_analytic(params)
        mutated = dataclasses.replace(params, chi=_kerr_sign * params.chi)
        amps = analytic.steady_amplitudes(mutated)
        ratio = 2.0 * abs(amps.c02) ** 2 / abs(amps.c01) ** 4
        worst = max(worst, _rel_err(direct, ratio))
    return CheckResult(
        "correlation-identity",
        worst <= tol,
        {"max_rel_err": worst, "n_points": n_points, "seed": seed},
        f"max relative deviation {worst:.3e} over {n_points} random points (tol {tol:.0e})",
    )


def _steady_pipeline(params: EffectiveParams, cutoffs: tuple[int, int]):
    space = model.effective_space(*cutoffs)
    h = model.build_h_eff(params, space)
    lv = steadystate.build_liouvillian(h, model.collapse_channels(params, space))
    return space, lv, steadystate.solve_steady(lv)


def check_steady_vs_evolution(seed: int = 12345, n_points: int = 3,
                              cutoffs: tuple[int, int] = model.DEFAULT_EFFECTIVE_CUTOFFS,
                              t_final: float = 50.0, dt: float = 1e-3,
                              tol: float = 1e-4) -> CheckResult:
    """Linear steady-state solve vs relaxation from vacuum."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        params = sample_params(rng)
        space, lv, rho_lin = _steady_pipeline(params, cutoffs)
        rho_t = steadystate.evolve(steadystate.vacuum_density(space), lv, t_final, dt)
        worst = max(worst, steadystate.trace_distance(rho_lin, rho_t))
    return CheckResult(
        "steady-vs-evolution",
        worst <= tol,
        {"max_trace_distance": worst, "n_points": n_points, "seed": seed,
         "t_final": t_final, "dt": dt},
        f"max trace distance {worst:.3e} over {n_points} random points (tol {tol:.0e})",
    )


SPOT_CHECK_POINTS = (
    EffectiveParams(delta_p=-16.5, delta_m=10.0, chi=0.5, g=0.5, F=0.05, gamma=0.5),
    EffectiveParams(delta_p=-5.0, delta_m=10.0, chi=0.5, g=0.5, F=0.05, gamma=0.5),
    EffectiveParams(delta_p=2.0, delta_m=10.0, chi=0.5, g=5.0, F=0.05, gamma=0.5),
    EffectiveParams(delta_p=-12.0, delta_m=10.0, chi=-1.0, g=1.0, F=0.05, gamma=0.5),
    EffectiveParams(delta_p=-21.0, delta_m=10.0, chi=2.0, g=1.0, F=0.05, gamma=0.5),
)


def check_truncation(cutoffs: tuple[int, int] = model.DEFAULT_EFFECTIVE_CUTOFFS,
                     points=SPOT_CHECK_POINTS, tol: float = 0.01) -> CheckResult:
    """Relative change of g2 when both cutoffs are raised must stay below tol."""
    larger = (cutoffs[0] + 4, cutoffs[1] + 2)
    worst = 0.0
    for params in points:
        _, _, rho_lo = _steady_pipeline(params, cutoffs)
        _, _, rho_hi = _steady_pipeline(params, larger)
        g2_lo = steadystate.g2_zero(rho_lo, "m")
        g2_hi = steadystate.g2_zero(rho_hi, "m")
        worst = max(worst, abs(g2_hi - g2_lo) / max(abs(g2_hi), 1e-300))
    return CheckResult(
        "truncation-convergence",
        worst <= tol,
        {"max_rel_change": worst, "cutoffs": cutoffs, "larger": larger},
        f"max relative g2 change {worst:.3e} raising cutoffs {cutoffs} -> {larger} (tol {tol})",
    )


def occupation_trajectory(lv, space, n_op_label: str, t_final: float, dt: float,
                          n_samples: int) -> np.ndarray:
    """<n>(t) of one mode sampled along a relaxation from vacuum."""
    rho = steadystate.vacuum_density(space)
    seg = t_final / n_samples
    out = np.empty(n_samples + 1)
    out[0] = steadystate.occupation(rho, n_op_label)
    for k in range(n_samples):
        rho = steadystate.evolve(rho, lv, seg, dt)
        out[k + 1] = steadystate.occupation(rho, n_op_label)
    return out


REDUCTION_TEST_FULL = FullModelParams(
    delta_p=-12.0, delta_s=250.0, delta_m_tilde=10.1, g_ms=5.0, J=5.0,
    F=0.05, gamma=0.5, kappa=1.0, kappa_s=0.0,
)


def check_reduction(full: FullModelParams = REDUCTION_TEST_FULL,
                    t_final: float = 10.0, n_samples: int = 100,
                    tol: float = 0.10) -> CheckResult:
    """Full three-mode vs reduced two-mode magnon population along relaxation.

    The relative deviation is evaluated where the full-model population has
    grown past 5% of its maximum; before that both trajectories are near zero
    and their ratio is noise.
    """
    effective = model.reduce_to_effective(full)

    fspace = model.full_space()
    fh = model.build_h_full(full, fspace)
    flv = steadystate.build_liouvillian(fh, model.collapse_channels(full, fspace))
    n_full = occupation_trajectory(flv, fspace, "m", t_final, 2e-4, n_samples)

    espace = model.effective_space()
    eh = model.build_h_eff(effective, espace)
    elv = steadystate.build_liouvillian(eh, model.collapse_channels(effective, espace))
    n_eff = occupation_trajectory(elv, espace, "m", t_final, 1e-3, n_samples)

    floor = 0.05 * n_full.max()
    mask = n_full > floor
    worst = float(np.max(np.abs(n_eff[mask] - n_full[mask]) / n_full[mask])) if mask.any() else np.inf
    return CheckResult(
        "reduction-validity",
        worst <= tol,
        {"max_rel_dev": worst, "n_samples": n_samples, "t_final": t_final,
         "peak_n_m_full": float(n_full.max())},
        f"max relative <n_m> deviation {worst:.3e} over t <= {t_final} (tol {tol})",
    )


def run_all_checks(seed: int = 12345,
                   cutoffs: tuple[int, int] = model.DEFAULT_EFFECTIVE_CUTOFFS) -> list[CheckResult]:
    return [
        check_amplitude_oracle(seed=seed),
        check_correlation_identity(seed=seed),
        check_steady_vs_evolution(seed=seed, cutoffs=cutoffs),
        check_truncation(cutoffs=cutoffs),
        check_reduction(),
    ]

import numpy as np
import pytest

from magnonblockade.analytic import (
    AmplitudeSet,
    amplitude_derivative,
    correlation_factors,
    evolve_amplitudes,
    g2_analytic,
    optimal_deltas,
    steady_amplitudes,
)
from magnonblockade.errors import AnalyticPoleError, SingularConditionError
from magnonblockade.model import EffectiveParams
from magnonblockade.validate import ansatz_block, sample_params, steady_amplitude_oracle


def eff(**overrides):
    base = dict(delta_p=-5.0, delta_m=10.0, chi=0.5, g=0.5, F=0.05, gamma=0.5)
    base.update(overrides)
    return EffectiveParams(**base)


VACUUM = AmplitudeSet(1.0, 0.0, 0.0, 0.0, 0.0, 0.0)

# parameter set with z + g^2 x = 0 exactly (x=1, z=-1, g=1)
POLE_PARAMS = dict(delta_p=-1.0, delta_m=1.0, chi=0.0, g=1.0, F=0.05, gamma=0.5)


# ----------------------------------------------------------------- dynamics

def test_vacuum_stationary_without_drive():
    d = amplitude_derivative(VACUUM, eff(F=0.0))
    assert np.abs(d.as_array()).max() == 0


def test_drive_feeds_photon_pairs_first():
    params = eff(F=0.08)
    d = amplitude_derivative(VACUUM, params)
    arr = d.as_array()
    assert d.c20 == pytest.approx(-1j * np.sqrt(2) * params.F)
    others = np.delete(arr, 1)
    assert np.abs(others).max() == 0


def test_magnon_sector_decouples_without_coupling():
    params = eff(g=0.0)
    state = AmplitudeSet(1.0, 0.3, 0.0, 0.1, 0.0, 0.0)
    d = amplitude_derivative(state, params)
    assert d.c01 == 0
    assert d.c02 == 0


def test_derivative_matches_hamiltonian_block():
    # the restricted dynamics must be exactly -i times the non-Hermitian block
    for params in (eff(), eff(delta_p=3.0, chi=-1.2, g=2.0, gamma=0.9)):
        block = ansatz_block(params, dissipative=True)
        for j in range(6):
            e = np.zeros(6, dtype=complex)
            e[j] = 1.0
            d = amplitude_derivative(AmplitudeSet.from_array(e), params).as_array()
            assert np.abs(d - (-1j) * block[:, j]).max() < 1e-13


def test_evolve_t0_identity():
    state = AmplitudeSet(0.9, 0.1, 0.0, 0.0, 0.0, 0.0)
    assert evolve_amplitudes(state, eff(), 0.0, 0.01) is state


def test_evolve_vacuum_fixed_without_drive():
    out = evolve_amplitudes(VACUUM, eff(F=0.0), 5.0, 0.01)
    assert np.abs(out.as_array() - VACUUM.as_array()).max() < 1e-14


def test_evolve_norm_non_increasing():
    params = eff()
    state = VACUUM
    norms = [state.norm()]
    for _ in range(20):
        state = evolve_amplitudes(state, params, 0.5, 0.005)
        norms.append(state.norm())
    assert all(b <= a * (1 + 1e-9) for a, b in zip(norms, norms[1:]))
    assert norms[-1] <= 1.0


def test_evolve_step_overflow():
    with pytest.raises(ValueError):
        evolve_amplitudes(VACUUM, eff(), 1e9, 1e-12)


def test_long_time_ratios_match_slowest_eigenvector():
    # independent oracle: the driven amplitudes converge onto the slowest
    # decaying eigenvector of the restricted non-Hermitian block
    params = eff()
    block = ansatz_block(params, dissipative=True)
    vals, vecs = np.linalg.eig(-1j * block)
    slow = np.argmax(vals.real)  # least negative decay
    v = vecs[:, slow]
    v = v / v[0]
    out = evolve_amplitudes(VACUUM, params, 200.0, 0.01).as_array()
    out = out / out[0]
    assert np.abs(out - v).max() < 1e-8


@pytest.mark.xfail(
    strict=True,
    reason="decay-free steady formulas deviate from the damped quasi-steady ratios "
    "by 8.6% on c01 and 56% on c02 at delta_p=-5 (the 2chi+2delta_p+delta_m factor "
    "is comparable to the decay rates there), so the 5% bound cannot hold",
)
def test_long_time_ratios_within_5pct_of_steady_forms():
    params = eff(delta_p=-5.0)
    out = evolve_amplitudes(VACUUM, params, 200.0, 0.01)
    steady = steady_amplitudes(params)
    for name in ("c01", "c02"):
        evolved = getattr(out, name) / out.c00
        target = getattr(steady, name)
        assert abs(evolved - target) / abs(target) <= 0.05


# ------------------------------------------------------------- steady forms

def test_steady_amplitudes_frozen_point():
    # independently computed via the 5x5 linear-system oracle
    amps = steady_amplitudes(eff(delta_p=0.0))
    assert amps.c00 == 1.0
    assert amps.c01 == pytest.approx(0.005263157894736842, rel=1e-12)
    assert amps.c20 == pytest.approx(-0.07443229275647868, rel=1e-12)
    assert amps.c40 == pytest.approx(0.002261763382071263, rel=1e-12)
    assert amps.c21 == pytest.approx(-0.00039174890924462477, rel=1e-12)
    assert amps.c02 == pytest.approx(1.9587445462231237e-05, rel=1e-12)


def test_steady_amplitudes_interference_zero():
    # x = 0 at delta_p = -16.5 for chi=0.5, delta_m=10
    amps = steady_amplitudes(eff(delta_p=-16.5))
    assert amps.c02 == 0
    assert amps.c21 == 0


def test_steady_amplitudes_no_coupling():
    amps = steady_amplitudes(eff(g=0.0))
    assert amps.c01 == 0
    assert amps.c02 == 0
    assert amps.c20 == pytest.approx(-0.05 / (np.sqrt(2) * (-5.0 + 0.5)), rel=1e-12)


def test_steady_amplitudes_singular_y():
    with pytest.raises(SingularConditionError) as err:
        steady_amplitudes(eff(delta_p=2.0, g=5.0))  # y = 25 - 25 = 0
    assert err.value.factor == "Y"


def test_steady_amplitudes_singular_pole():
    with pytest.raises(SingularConditionError) as err:
        steady_amplitudes(EffectiveParams(**POLE_PARAMS))
    assert err.value.factor == "Z+g^2*X"


def test_steady_amplitudes_singular_backsubstitution():
    # g=0 with delta_p+chi=0 forces y=0 as well, so the y guard fires first
    with pytest.raises(SingularConditionError) as err:
        steady_amplitudes(eff(delta_p=-0.5, chi=0.5, g=0.0))
    assert err.value.factor == "Y"
    with pytest.raises(SingularConditionError) as err:
        steady_amplitudes(eff(delta_p=-1.5, chi=0.5, g=0.7))
    assert err.value.factor == "4*delta_p+12*chi"


def test_oracle_agreement_100_random_points():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        params = sample_params(rng)
        closed = steady_amplitudes(params).as_array()
        brute = steady_amplitude_oracle(params).as_array()
        scale = np.maximum(np.abs(closed), 1e-300)
        assert (np.abs(closed - brute) / scale).max() < 1e-9


# -------------------------------------------------------------- correlation

def test_g2_zero_at_interference_root():
    assert g2_analytic(eff(delta_p=-16.5)) == 0
    assert g2_analytic(eff(delta_p=-16.5, g=3.3)) == 0


def test_g2_zero_at_anharmonic_root():
    assert g2_analytic(eff(delta_p=2.0, g=5.0)) == 0


def test_g2_frozen_point():
    # x=23, y=45.25, z=35: value cross-checked against 2|c02|^2/|c01|^4
    assert g2_analytic(eff(delta_p=-5.0)) == pytest.approx(652.2853325303926, rel=1e-12)


def test_g2_matches_amplitude_ratio():
    rng = np.random.default_rng(99)
    for _ in range(100):
        params = sample_params(rng)
        amps = steady_amplitudes(params)
        ratio = 2 * abs(amps.c02) ** 2 / abs(amps.c01) ** 4
        assert g2_analytic(params) == pytest.approx(ratio, rel=1e-9)


def test_g2_pole_error():
    with pytest.raises(AnalyticPoleError):
        g2_analytic(EffectiveParams(**POLE_PARAMS))


def test_g2_even_in_g():
    for params in (eff(g=0.5), eff(g=2.7, chi=-1.0)):
        flipped = eff(g=-params.g, chi=params.chi)
        assert g2_analytic(params) == g2_analytic(flipped)


@pytest.mark.parametrize("root_kind", ["umb", "cmb"])
def test_g2_vanishes_quadratically_near_roots(root_kind):
    params = eff(g=2.0)
    roots = optimal_deltas(params)
    root = roots.umb_delta_p if root_kind == "umb" else roots.cmb_delta_p
    eps = np.logspace(-4, -3, 12)
    vals = np.array([g2_analytic(eff(g=2.0, delta_p=root + e)) for e in eps])
    slope = np.polyfit(np.log10(eps), np.log10(vals), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


def test_amplitude_hierarchy_at_acceptance_points():
    from magnonblockade.validate import SPOT_CHECK_POINTS

    for params in SPOT_CHECK_POINTS:
        amps = steady_amplitudes(params)
        first = max(abs(amps.c20), abs(amps.c01))
        second = max(abs(amps.c40), abs(amps.c21), abs(amps.c02))
        assert abs(amps.c00) >= 3 * first
        assert first >= 3 * second


# -------------------------------------------------------------------- roots

def test_umb_root_examples():
    assert optimal_deltas(eff()).umb_delta_p == pytest.approx(-16.5)
    assert optimal_deltas(eff(chi=-1.0)).umb_delta_p == pytest.approx(-12.0)


def test_cmb_root_example():
    assert optimal_deltas(eff(g=5.0)).cmb_delta_p == pytest.approx(2.0)


def test_umb_root_independent_of_g():
    assert optimal_deltas(eff(g=0.1)).umb_delta_p == optimal_deltas(eff(g=9.0)).umb_delta_p


def test_roots_zero_delta_m():
    roots = optimal_deltas(eff(delta_m=0.0))
    assert roots.umb_delta_p == pytest.approx(-1.5)
    assert roots.cmb_delta_p is None


def test_roots_unknown_axis():
    with pytest.raises(ValueError):
        optimal_deltas(eff(), solve_for="delta_m")


def test_correlation_factors_values():
    x, y, z = correlation_factors(eff(delta_p=-5.0))
    assert (x, y, z) == (23.0, 45.25, 35.0)


def test_amplitude_set_rejects_non_finite():
    with pytest.raises(ValueError):
        AmplitudeSet(float("inf"), 0, 0, 0, 0, 0)

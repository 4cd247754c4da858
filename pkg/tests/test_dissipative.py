import math

import numpy as np
import pytest
from mpmath import mp, mpf

from qdeleter.bath import BathParams, derive_constants
from qdeleter.dissipative import (
    KrausSet,
    apply_kraus,
    asymptotic_state,
    evolve_bloch,
    fidelity_law,
    fidelity_lower_bound,
    finite_difference_contraction_rate,
    gad_kraus,
    initial_contraction_rate,
    kraus_completeness_residual,
)
from qdeleter.errors import InvalidArgument, UnsupportedRegime
from qdeleter.state import (
    InitialAngles,
    bloch_length,
    bloch_to_density,
    density_to_bloch,
    fidelity_to_blank,
    pure_state_from_angles,
    trace_distance,
)

from conftest import random_ball
from lindblad_expm import propagate

# 2/e - 1, sqrt(1 - e^-5), e/(1+e), 1 - exp(-2 Gamma) at T=1, gamma0=0.5 (mpmath, 30 digits)
SZ_T2 = -0.264241117657115356808952459677
F_T10 = 0.996625332309446433380245875812
P_T1 = 0.731058578630004879251159241822
LAMBDA_T1 = 0.88512990683049371057756804606

VACUUM = BathParams(0.5)


def random_params(rng, phi=None):
    return BathParams(
        gamma0=rng.uniform(0.1, 1.0),
        omega=1.0,
        T=float(rng.choice([0.0, 0.5, 1.0, 2.0])),
        r=rng.uniform(-0.5, 0.5),
        Phi=rng.uniform(0, 2 * math.pi) if phi is None else phi,
    )


def test_blank_state_is_fixed_point_of_vacuum():
    for t in (0.0, 0.3, 2.0, 50.0):
        assert evolve_bloch((0, 0, -1), VACUUM, t) == (0.0, 0.0, -1.0)


def test_excited_state_decay():
    b = evolve_bloch((0, 0, 1), VACUUM, 2.0)
    np.testing.assert_allclose(b, (0, 0, SZ_T2), atol=1e-15)


def test_mixed_state_purifies():
    b = evolve_bloch((0, 0, 0), VACUUM, 60.0)  # Gamma t = 30
    np.testing.assert_allclose(b, (0, 0, -1), atol=1e-9)


def test_time_zero_is_identity(rng):
    for b0 in random_ball(rng, 20):
        assert evolve_bloch(b0, random_params(rng), 0.0) == tuple(b0)


def test_negative_time_rejected():
    with pytest.raises(InvalidArgument):
        evolve_bloch((0, 0, 1), VACUUM, -1e-3)


def test_closed_form_matches_superoperator_exponential(rng):
    # every phase, not just Phi = 0: checks the sigma_1/sigma_2 cross-terms
    for _ in range(200):
        p = random_params(rng)
        b0 = random_ball(rng, 1)[0]
        t = rng.uniform(0, 10)
        ref = propagate(b0, p.gamma0, p.omega, p.T, p.r, p.Phi, t)
        np.testing.assert_allclose(evolve_bloch(b0, p, t), ref, atol=1e-10)


def _printed_form_mpmath(b0, p, t):
    """The closed form evaluated naively (growing exponential times beta) at 60 digits."""
    mp.dps = 60
    g0, T, r, Phi, t = (mpf(v) for v in (p.gamma0, p.T, p.r, p.Phi, t))
    n_th = mpf(0) if T == 0 else 1 / (mp.exp(mpf(p.omega) / T) - 1)
    N = n_th * (mp.cosh(r) ** 2 + mp.sinh(r) ** 2) + mp.sinh(r) ** 2
    a = mp.sinh(2 * r) * (2 * n_th + 1)
    beta = mp.exp(-g0 / 2 * (2 * N + 1 + a) * t)
    cross = mp.sin(Phi) * mp.sinh(g0 * a * t / 2) * mp.exp(-g0 / 2 * (2 * N + 1) * t)
    sx0, sy0, sz0 = (mpf(v) for v in b0)
    sx = (1 + (mp.exp(g0 * a * t) - 1) * (1 + mp.cos(Phi)) / 2) * beta * sx0 - cross * sy0
    sy = (1 + (mp.exp(g0 * a * t) - 1) * (1 - mp.cos(Phi)) / 2) * beta * sy0 - cross * sx0
    G = g0 * (2 * N + 1)
    sz = mp.exp(-G * t) * sz0 - (1 - mp.exp(-G * t)) / (2 * N + 1)
    return [float(sx), float(sy), float(sz)]


def test_large_squeezing_time_product_stays_finite():
    p = BathParams(1.0, 1.0, 2.0, 3.0, 0.3)
    env = derive_constants(p)
    # exp(gamma0 a t) alone overflows a double at this t
    assert env.gamma0 * env.a * 500.0 > 710
    b = evolve_bloch((0.5, 0.5, 0.5), p, 500.0)
    np.testing.assert_allclose(b, _printed_form_mpmath((0.5, 0.5, 0.5), p, 500.0), rtol=1e-9, atol=1e-15)


def test_matches_printed_form_at_high_precision(rng):
    for _ in range(30):
        p = random_params(rng)
        b0 = random_ball(rng, 1)[0]
        t = rng.uniform(0, 10)
        np.testing.assert_allclose(evolve_bloch(b0, p, t), _printed_form_mpmath(b0, p, t), atol=1e-13)


def test_asymptotic_state_examples():
    s = asymptotic_state(VACUUM)
    assert s.p == 1.0
    np.testing.assert_array_equal(s.density_matrix(), np.diag([0, 1]))
    hot = asymptotic_state(BathParams(0.5, 1.0, 1e8))
    assert hot.p == pytest.approx(0.5, abs=1e-8)
    thermal = BathParams(0.5, 1.0, 1.0)
    assert asymptotic_state(thermal).p == pytest.approx(P_T1, abs=1e-14)
    late = evolve_bloch((0.2, -0.3, 0.9), thermal, 200.0)
    assert late.sz == pytest.approx(-1 / (2 * derive_constants(thermal).n_eff + 1), abs=1e-12)


def test_fidelity_law_examples():
    assert fidelity_law(-1.0, VACUUM, 0.0) == 1.0
    assert fidelity_law(1.0, VACUUM, 10.0) == pytest.approx(F_T10, abs=1e-14)
    assert fidelity_law(1.0, BathParams(0.5, 1.0, 1e6), 10.0) == pytest.approx(1 / math.sqrt(2), abs=1e-3)


def test_fidelity_law_rejects_bad_sz0():
    with pytest.raises(InvalidArgument):
        fidelity_law(1.5, VACUUM, 1.0)


def test_fidelity_law_matches_state_fidelity(rng):
    for _ in range(300):
        p = random_params(rng)
        b0 = random_ball(rng, 1)[0]
        t = rng.uniform(0, 10)
        rho_t = bloch_to_density(evolve_bloch(b0, p, t))
        assert fidelity_law(b0[2], p, t) == pytest.approx(fidelity_to_blank(rho_t), abs=1e-12)


def test_lower_bound_examples():
    assert fidelity_lower_bound(VACUUM, 0.0) == 0.0
    assert fidelity_lower_bound(VACUUM, 200.0) == 1.0
    assert fidelity_lower_bound(VACUUM, 10.0) == pytest.approx(F_T10, abs=1e-14)


def test_fidelity_sandwich(rng):
    for _ in range(300):
        p = random_params(rng)
        t = rng.uniform(0, 10)
        sz0 = rng.uniform(-1, 1)
        lo = fidelity_lower_bound(p, t)
        assert lo <= fidelity_law(sz0, p, t) + 1e-12
        assert fidelity_law(sz0, p, t) <= 1.0 + 1e-12
        assert lo == pytest.approx(fidelity_law(1.0, p, t), abs=1e-12)


def test_contraction_rate_examples():
    assert initial_contraction_rate((0, 0, -1), VACUUM) == 0.0
    assert initial_contraction_rate((0, 0, 1), VACUUM) == pytest.approx(-1.0, abs=1e-15)
    assert finite_difference_contraction_rate((0, 0, 1), VACUUM) == pytest.approx(-1.0, abs=1e-6)
    for theta0 in (math.pi / 8, math.pi / 4):
        assert initial_contraction_rate(pure_state_from_angles(InitialAngles(theta0)), VACUUM) < 0.0


def test_contraction_rate_matches_finite_difference(rng):
    for _ in range(50):
        p = random_params(rng)
        b0 = random_ball(rng, 1)[0]
        exact = initial_contraction_rate(b0, p)
        assert finite_difference_contraction_rate(b0, p, h=1e-5) == pytest.approx(exact, abs=1e-6)


def test_every_pure_state_but_blank_plunges_inward(rng):
    for theta0, phi0 in zip(rng.uniform(0, math.pi - 1e-3, 100), rng.uniform(0, 2 * math.pi, 100)):
        assert initial_contraction_rate(pure_state_from_angles(InitialAngles(theta0, phi0)), VACUUM) < 0.0


def test_gad_identity_at_time_zero():
    k = gad_kraus(VACUUM, 0.0)
    assert len(k) == 1
    np.testing.assert_array_equal(k.operators[0], np.eye(2))
    thermal = gad_kraus(BathParams(0.5, 1.0, 1.0), 0.0)
    rho = bloch_to_density((0.1, 0.2, 0.3))
    np.testing.assert_allclose(apply_kraus(thermal, rho), rho, atol=1e-15)


def test_gad_zero_temperature_is_amplitude_damping():
    k = gad_kraus(VACUUM, 2.0)
    assert k.labels == ("E0", "E1")
    lam = 1 - math.exp(-1.0)
    np.testing.assert_allclose(k.operators[0], np.diag([math.sqrt(1 - lam), 1.0]), atol=1e-15)
    np.testing.assert_allclose(k.operators[1], [[0, 0], [math.sqrt(lam), 0]], atol=1e-15)
    for b0 in [(0, 0, 1), (0, 0, -1), (1, 0, 0), (0, 1, 0)]:
        out = density_to_bloch(apply_kraus(k, bloch_to_density(b0)))
        np.testing.assert_allclose(out, evolve_bloch(b0, VACUUM, 2.0), atol=1e-12)


def test_gad_thermal_parameters():
    p = BathParams(0.5, 1.0, 1.0)
    k = gad_kraus(p, 2.0)
    assert len(k) == 4
    q = asymptotic_state(p).p
    lam = 1 - k.operators[0][0, 0].real ** 2 / q
    assert q == pytest.approx(P_T1, abs=1e-14)
    assert lam == pytest.approx(LAMBDA_T1, abs=1e-12)
    out = density_to_bloch(apply_kraus(k, np.eye(2) / 2))
    np.testing.assert_allclose(out, evolve_bloch((0, 0, 0), p, 2.0), atol=1e-12)


def test_gad_rejects_squeezing():
    with pytest.raises(UnsupportedRegime):
        gad_kraus(BathParams(0.5, r=0.1), 1.0)


def test_kraus_equivalence(rng):
    for _ in range(20):
        p = BathParams(rng.uniform(0.1, 1.0), 1.0, float(rng.choice([0.0, 0.5, 1.0, 2.0])))
        for t in np.linspace(0, 10, 5):
            k = gad_kraus(p, t)
            assert kraus_completeness_residual(k) <= 1e-12
            for b0 in random_ball(rng, 5):
                out = apply_kraus(k, bloch_to_density(b0))
                np.testing.assert_allclose(out, bloch_to_density(evolve_bloch(b0, p, t)), atol=1e-10)


def test_apply_kraus_examples():
    rho = bloch_to_density((0.3, -0.1, 0.2))
    np.testing.assert_array_equal(apply_kraus(KrausSet((np.eye(2, dtype=complex),)), rho), rho)
    full = KrausSet((np.diag([0.0, 1.0]).astype(complex), np.array([[0, 0], [1, 0]], dtype=complex)))
    np.testing.assert_allclose(apply_kraus(full, np.diag([1, 0])), np.diag([0, 1]), atol=1e-15)


def test_apply_kraus_rejects_incomplete():
    with pytest.raises(InvalidArgument):
        apply_kraus(KrausSet((1.01 * np.eye(2),)), np.eye(2) / 2)


def test_contractivity(rng):
    for _ in range(200):
        p = random_params(rng)
        t = rng.uniform(0, 10)
        a, b = random_ball(rng, 2)
        before = trace_distance(bloch_to_density(a), bloch_to_density(b))
        after = trace_distance(bloch_to_density(evolve_bloch(a, p, t)), bloch_to_density(evolve_bloch(b, p, t)))
        assert after <= before + 1e-12


def test_fixed_point_finite_occupation(rng):
    for _ in range(50):
        p = random_params(rng)
        env = derive_constants(p)
        fixed = (0.0, 0.0, -env.inv_2n1)
        for t in (0.5, 3.0, 10.0):
            np.testing.assert_allclose(evolve_bloch(fixed, env, t), fixed, atol=1e-10)


@pytest.mark.parametrize("squeezed", [False, True])
def test_semigroup(rng, squeezed):
    for _ in range(100):
        p = random_params(rng)
        if not squeezed:
            p = BathParams(p.gamma0, p.omega, p.T)
        b0 = random_ball(rng, 1)[0]
        t1, t2 = rng.uniform(0, 5, 2)
        two_step = evolve_bloch(evolve_bloch(b0, p, t1), p, t2)
        np.testing.assert_allclose(two_step, evolve_bloch(b0, p, t1 + t2), atol=1e-10)


def test_vacuum_returns_to_purity(rng):
    for b0 in random_ball(rng, 100):
        assert 1 - bloch_length(evolve_bloch(b0, VACUUM, 60.0)) <= 1e-6
    dip = evolve_bloch((0, 0, 1), VACUUM, math.log(2) / 0.5)
    assert bloch_length(dip) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("r", [0.2, -0.4, 0.05])
def test_squeezing_prevents_purity(r):
    p = BathParams(0.6, 1.0, 0.0, r)
    assert bloch_length(evolve_bloch((0, 0, 0), p, 200.0)) < 1.0
    assert bloch_length(evolve_bloch((0, 0, 1), p, 200.0)) == pytest.approx(
        derive_constants(p).inv_2n1, abs=1e-12
    )

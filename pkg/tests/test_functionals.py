import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kirchhoff_gs.coefficient import Affine, Constant
from kirchhoff_gs.functionals import (A_from_level, energy_derivative, energy_report, existence_margin,
                                      kirchhoff_energy, level_from_A, local_energy, minimization_level, mv_energy,
                                      pohozaev_check, pohozaev_residual, sobolev_best_constant, talenti_ratio)
from kirchhoff_gs.groundstate import LocalProblem
from kirchhoff_gs.nonlinearity import CriticalExponential, NonlinearitySpec, polynomial_nonlinearity
from kirchhoff_gs.radial import RadialProfile, profile_from_function, radial_grid, rescale_profile

GRID = radial_grid()
ZERO_F = NonlinearitySpec(3, polynomial_nonlinearity([0.0]))


def test_zero_profile():
    z = RadialProfile(3, GRID, np.zeros_like(GRID), np.zeros_like(GRID))
    prob = LocalProblem(ZERO_F, 1.0)
    assert local_energy(z, prob) == 0.0
    assert kirchhoff_energy(z, prob, Affine(1.0, 0.5)) == 0.0
    chk = pohozaev_check(z, prob)
    assert chk.residual == 0.0 and chk.degenerate


def test_free_energy_of_exponential():
    u = profile_from_function(lambda r: np.exp(-r), 3, GRID, lambda r: -np.exp(-r))
    assert local_energy(u, LocalProblem(ZERO_F, 1.0)) == pytest.approx(math.pi, rel=1e-9)


def test_generic_profile_violates_pohozaev():
    u = profile_from_function(lambda r: np.exp(-r * r), 2, GRID, lambda r: -2 * r * np.exp(-r * r))
    assert pohozaev_residual(u, LocalProblem(NonlinearitySpec(2, CriticalExponential(1.0)), 1.0)) > 1e-2


def test_constant_coefficient_energy_is_local(gs3):
    assert kirchhoff_energy(gs3.profile, gs3.problem, Constant(1.0)) == pytest.approx(gs3.energy, rel=1e-15)


def test_energy_identities(gs3, gs2):
    assert gs3.energy == pytest.approx(gs3.norms.grad_sq / 3.0, rel=1e-6)
    assert gs2.energy == pytest.approx(gs2.norms.grad_sq / 2.0, rel=1e-6)


def test_mv_identity_at_lifted_states(gs3, gs2, lift3, lift2, affine):
    for gs, lr in ((gs3, lift3), (gs2, lift2)):
        e = kirchhoff_energy(lr.v, gs.problem, affine)
        assert e == pytest.approx(mv_energy(affine, lr.grad_sq_v, gs.N), rel=1e-6)


@pytest.mark.parametrize("fixture", ["gs3", "gs2"])
def test_ground_state_is_critical(fixture, request):
    gs = request.getfixturevalue(fixture)
    r = gs.profile.r
    phi = profile_from_function(lambda s: np.exp(-s * s), gs.N, r, lambda s: -2 * s * np.exp(-s * s))
    scale = math.sqrt(gs.norms.grad_sq + gs.norms.mass_sq)
    assert abs(energy_derivative(gs.profile, gs.problem, phi)) <= 1e-6 * scale


def test_level_examples():
    assert A_from_level(0.31, 2) == 0.31
    b = 4.0
    assert A_from_level(b, 3) == pytest.approx(0.5 * 6.0 ** (1 / 3) * (3 * b) ** (2 / 3), rel=1e-15)


@given(st.floats(1e-3, 1e3), st.integers(2, 6))
def test_level_round_trip(A, N):
    assert A_from_level(level_from_A(A, N), N) == pytest.approx(A, rel=1e-12)


def test_minimization_level_matches_frozen(gs3, gs2, oracles):
    assert minimization_level(gs3) == pytest.approx(oracles["regression"]["N3_lambda1_p5_m1"]["A_level"], rel=1e-8)
    assert minimization_level(gs2) == pytest.approx(oracles["regression"]["N2_mu1_m1"]["A_level"], rel=1e-8)


def test_sobolev_constant_closed_form(oracles):
    assert sobolev_best_constant(3) == pytest.approx(oracles["closed_form"]["sobolev_S3"], rel=1e-12)


@given(st.sampled_from([0.5, 2.0, 0.7, 1.3, 3.0]), st.integers(3, 5))
def test_talenti_ratio_scale_invariant(sigma, N):
    base = talenti_ratio(N)
    assert base > 0
    assert talenti_ratio(N, sigma) == pytest.approx(base, rel=1e-8)


def test_talenti_needs_n3():
    with pytest.raises(ValueError):
        talenti_ratio(2)


def test_existence_margins(gs3, gs2):
    assert existence_margin(gs3) < 0
    assert existence_margin(gs2) < 0
    rep = energy_report(gs2)
    assert rep.A_level < 0.5 and rep.sobolev_S is None


def test_margin_zero_at_threshold():
    S = sobolev_best_constant(3)

    class AtThreshold:
        N = 3
        energy = S**1.5 / 3.0

    assert existence_margin(AtThreshold) == pytest.approx(0.0, abs=1e-14)


@given(st.floats(0.3, 3.0))
def test_pohozaev_defect_of_dilations(gs3, sigma):
    # G(u(./s)) = s^3 G(u) and grad_sq(u(./s)) = s grad_sq(u), so the defect is |s^2 - 1|
    v = rescale_profile(gs3.profile, sigma)
    assert pohozaev_residual(v, gs3.problem) == pytest.approx(abs(sigma**2 - 1.0), abs=1e-6)

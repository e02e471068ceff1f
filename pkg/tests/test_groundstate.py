import math

import numpy as np
import pytest

from kirchhoff_gs.exceptions import NotGroundState
from kirchhoff_gs.functionals import pohozaev_check
from kirchhoff_gs.groundstate import (LocalProblem, ShootingOptions, ShotKind, fd_newton_solve, find_ground_state,
                                      pde_residual, shoot)
from kirchhoff_gs.nonlinearity import NonlinearitySpec, polynomial_nonlinearity, truncate
from kirchhoff_gs.radial import RadialProfile, resample, uniform_grid

CUBIC = NonlinearitySpec(3, polynomial_nonlinearity([0.0, 0.0, 0.0, 1.0]))


def test_shot_classification(prob3, gs3):
    assert shoot(prob3, 1e-3).kind is ShotKind.UNDERSHOOT
    assert shoot(prob3, 10.0).kind is ShotKind.OVERSHOOT
    lo, hi = gs3.brackets[-1]
    assert lo < gs3.shoot_height < hi
    s = gs3.shoot_height
    assert shoot(prob3, s * (1 - 1e-9)).kind is ShotKind.UNDERSHOOT
    assert shoot(prob3, s * (1 + 1e-9)).kind is ShotKind.OVERSHOOT


@pytest.mark.parametrize("name, fixture", [("N3_lambda1_p5_m1", "gs3"), ("N2_mu1_m1", "gs2")])
def test_regression_against_frozen(name, fixture, request, oracles):
    gs = request.getfixturevalue(fixture)
    ref = oracles["regression"][name]
    assert gs.shoot_height == pytest.approx(ref["shoot_height"], rel=1e-9)
    assert gs.energy == pytest.approx(ref["energy"], rel=1e-8)
    assert gs.norms.grad_sq == pytest.approx(ref["grad_sq"], rel=1e-8)
    assert gs.norms.mass_sq == pytest.approx(ref["mass_sq"], rel=1e-8)


@pytest.mark.parametrize("fixture", ["gs3", "gs2"])
def test_ground_state_shape(fixture, request):
    gs = request.getfixturevalue(fixture)
    u = gs.profile.u
    assert np.all(u > 0)
    assert u[0] == gs.norms.sup_norm == gs.shoot_height
    assert np.all(np.diff(u) < 0)
    assert gs.profile.tail is not None and gs.profile.tail.c > 0
    assert gs.pohozaev_residual <= 1e-6


def test_tail_rate_is_sqrt_m(gs3, gs2):
    assert gs3.profile.tail.c == pytest.approx(1.0, rel=1e-3)
    assert gs2.profile.tail.c == pytest.approx(1.0, rel=1e-2)


@pytest.mark.parametrize("fixture", ["gs3", "gs2"])
def test_pde_residual_small(fixture, request):
    gs = request.getfixturevalue(fixture)
    assert np.max(pde_residual(gs.profile, gs.problem)) <= 1e-6


def test_two_dimensional_pohozaev_G_vanishes(gs2):
    chk = pohozaev_check(gs2.profile, gs2.problem)
    assert abs(chk.G) <= 1e-6 * chk.grad_sq
    assert not chk.degenerate


def test_fd_newton_agrees_with_shooting(gs3, gs2):
    for gs in (gs3, gs2):
        init = resample(gs.profile, uniform_grid())
        fd, rep = fd_newton_solve(gs.problem, init, full_output=True)
        assert np.max(np.abs(fd.u - init.u)) <= 1e-5
        assert rep.scaled_residual <= 1e-10


def test_fd_newton_fixed_point_converges_fast(gs3):
    init = resample(gs3.profile, uniform_grid())
    fd = fd_newton_solve(gs3.problem, init)
    again, rep = fd_newton_solve(gs3.problem, fd, full_output=True)
    assert rep.iterations <= 2
    # Newton steps bottom out near 1e-11 relative (roundoff in the banded solve)
    assert np.max(np.abs(again.u - fd.u)) <= 1e-9 * fd.u[0]


def test_fd_newton_zero_init_is_not_a_ground_state(prob3):
    r = uniform_grid(20.0, 2001)
    with pytest.raises(NotGroundState):
        fd_newton_solve(prob3, RadialProfile(3, r, np.zeros_like(r)))


def test_truncated_problem_reproduces_profile(prob3, gs3):
    kappa = 1.1 * gs3.norms.sup_norm
    k = 1.01 * (kappa**5 + kappa**4)
    tr = find_ground_state(LocalProblem(truncate(prob3.spec, k), prob3.m))
    assert np.max(np.abs(tr.profile.u - gs3.profile.u)) <= 1e-8


@pytest.fixture(scope="module")
def cubic_unit():
    return find_ground_state(LocalProblem(CUBIC, 1.0))


@pytest.mark.parametrize("m", [0.5, 2.0])
def test_cubic_scaling_law(cubic_unit, m):
    # f(t) = t^3: u_m(r) = sqrt(m) u_1(sqrt(m) r)
    gs = find_ground_state(LocalProblem(CUBIC, m))
    assert gs.shoot_height == pytest.approx(math.sqrt(m) * cubic_unit.shoot_height, rel=1e-8)
    # energy scales like m^{2 - N/2}
    assert gs.energy == pytest.approx(math.sqrt(m) * cubic_unit.energy, rel=1e-6)


def test_decay_classification(prob3, gs3):
    # the default band (r > 20, u < 1e-8) lies past where the growing mode takes over
    s = gs3.shoot_height
    assert shoot(prob3, s).kind is not ShotKind.DECAY
    relaxed = ShootingOptions(decay_r=8.0, decay_u=1e-3 * s)
    shot = shoot(prob3, s, relaxed)
    assert shot.kind is ShotKind.DECAY and shot.radius >= 8.0


def test_problem_guards():
    with pytest.raises(ValueError):
        LocalProblem(CUBIC, 0.0)
    assert ShootingOptions().resolved_s_max(CUBIC) == 50.0

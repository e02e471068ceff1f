"""Dilations carrying local ground states to Kirchhoff ground states and back.

If u solves -Lap u + m u = f(u), then v(x) = u(x / t) solves

    -M(||grad v||^2) Lap v + m v = f(v)

as soon as t^2 = M(||grad v||^2) = M(t^{N-2} ||grad u||^2).  For N >= 3 the
smallest such t is t_u; for N = 2 the Dirichlet norm is dilation invariant
and t = sqrt(M(||grad u||^2)) directly.  Conversely a Kirchhoff solution v
gives the local solution u(x) = v(h_v x) with h_v = sqrt(M(||grad v||^2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .coefficient import KirchhoffCoeff, eval_M
from .exceptions import NoRoot, ResidualTooLarge
from .functionals import kirchhoff_energy, least_energy_formula, mv_energy
from .groundstate import GroundState, LocalProblem, pde_residual
from .radial import RadialProfile, h1_norms, rescale_profile


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    g_lo: float
    g_hi: float


def _g(c: KirchhoffCoeff, grad_sq: float, N: int, t: float) -> float:
    Mv = eval_M(c, t ** (N - 2) * grad_sq)
    if not math.isfinite(Mv):
        raise FloatingPointError(f"M is not finite at t={t}")
    return t * t - Mv


def solve_t_u(c: KirchhoffCoeff, grad_sq: float, N: int, full_output: bool = False):
    """Smallest t > 0 with t^2 = M(t^{N-2} grad_sq).

    Upward scan by factors of 1.5 from t = 1e-6 to the first sign change of
    g(t) = t^2 - M(t^{N-2} grad_sq), then Brent's method on that bracket.
    """
    if N < 3:
        raise ValueError("t_u is defined for N >= 3")
    if not grad_sq > 0:
        raise ValueError("grad_sq must be positive")
    t, g_prev = 1e-6, _g(c, grad_sq, N, 1e-6)
    if g_prev >= 0:
        raise NoRoot("g(0+) >= 0: M(0) must be positive (M1)")
    while True:
        t_next = 1.5 * t
        if t_next > 1e6:
            raise NoRoot("no sign change of t^2 - M(t^(N-2) grad_sq) up to t = 1e6")
        g_next = _g(c, grad_sq, N, t_next)
        if g_next >= 0:
            break
        t, g_prev = t_next, g_next
    if g_next == 0:
        root = t_next
    else:
        root = optimize.brentq(lambda s: _g(c, grad_sq, N, s), t, t_next, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                               maxiter=200)
    if full_output:
        return root, RootBracket(t, t_next, g_prev, g_next)
    return root


@dataclass(frozen=True, eq=False)
class LiftResult:
    v: RadialProfile
    t_u: float  # dilation factor: t_u for N >= 3, sqrt(M(grad_sq(u))) for N = 2
    h_v: float
    grad_sq_v: float
    kirchhoff_residual: float
    energy_identity_residual: float
    least_energy_residual: float = math.nan

    def summary(self) -> dict:
        return {
            "t_u": self.t_u,
            "h_v": self.h_v,
            "grad_sq_v": self.grad_sq_v,
            "kirchhoff_residual": self.kirchhoff_residual,
            "energy_identity_residual": self.energy_identity_residual,
            "least_energy_residual": self.least_energy_residual,
        }


def kirchhoff_residual(v: RadialProfile, prob: LocalProblem, c: KirchhoffCoeff) -> float:
    """max_i |M(||grad v||^2) Lap v - m v + f(v)| / (1 + |f(v)|) over interior nodes."""
    if not np.any(v.u):
        return 0.0
    p = v.with_derivative()
    theta = h1_norms(p).grad_sq
    return float(np.max(pde_residual(p, prob, diffusion=eval_M(c, theta))))


def lift(gs: GroundState, c: KirchhoffCoeff) -> LiftResult:
    """Kirchhoff ground state v = u(. / t) from a local ground state u."""
    u, N = gs.profile, gs.N
    g_u = gs.norms.grad_sq
    sigma = solve_t_u(c, g_u, N) if N >= 3 else math.sqrt(eval_M(c, g_u))
    v = rescale_profile(u, sigma)
    norms = h1_norms(v)
    t = norms.grad_sq
    h_v = math.sqrt(eval_M(c, t))
    e_v = kirchhoff_energy(v, gs.problem, c, norms=norms)
    e_mv = mv_energy(c, t, N)
    least = math.nan
    if N >= 3:
        least = abs(gs.energy - least_energy_formula(c, t, N)) / abs(gs.energy)
    return LiftResult(v, float(sigma), h_v, t, kirchhoff_residual(v, gs.problem, c),
                      abs(e_v - e_mv) / abs(e_mv), least)


def project(v: RadialProfile, prob: LocalProblem, c: KirchhoffCoeff, max_residual: float = 1e-5) -> RadialProfile:
    """Local ground state u(r) = v(h_v r), h_v = sqrt(M(||grad v||^2)).

    The result lives on the contracted grid r / h_v, so a lifted profile is
    recovered on its original nodes.
    """
    res = kirchhoff_residual(v, prob, c)
    if res > max_residual:
        raise ResidualTooLarge(f"Kirchhoff residual {res:.3e} exceeds {max_residual:.1e}")
    h_v = math.sqrt(eval_M(c, h1_norms(v.with_derivative()).grad_sq))
    return rescale_profile(v, 1.0 / h_v)

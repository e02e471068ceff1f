"""Energy functionals, Pohozaev identities and the least-energy levels.

For a radial profile u and the local problem (f, m)

    local energy      L~(u) = 1/2 (||grad u||^2 + m ||u||^2) - int F(u),
    Kirchhoff energy  L(u)  = 1/2 M^(||grad u||^2) + m/2 ||u||^2 - int F(u),
    Pohozaev          int (F(u) - m/2 u^2) = (N-2)/(2N) ||grad u||^2.

For N = 2 the Pohozaev identity reads G(u) = int (F(u) - m/2 u^2) = 0.
The constrained minimization level A and the mountain pass level b satisfy
b = (1/N) ((N-2)/(2N))^{(N-2)/2} (2A)^{N/2} for N >= 3, and b = A for N = 2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import special

from .coefficient import KirchhoffCoeff, eval_M, eval_Mhat
from .nonlinearity import critical_exponent, eval_F, eval_f
from .radial import NormBundle, RadialProfile, grid_quadrature, h1_norms, integrate_radial, radial_grid, sphere_area


def _is_zero(u: RadialProfile) -> bool:
    return not np.any(u.u)


def potential_integral(u: RadialProfile, prob) -> float:
    """int_{R^N} F(u) dx."""
    return integrate_radial(eval_F(prob.spec, u.u), u.N, u.r)


def local_energy(u: RadialProfile, prob, norms: Optional[NormBundle] = None) -> float:
    if _is_zero(u):
        return 0.0
    nb = norms or h1_norms(u.with_derivative())
    return 0.5 * (nb.grad_sq + prob.m * nb.mass_sq) - potential_integral(u, prob)


def kirchhoff_energy(u: RadialProfile, prob, c: KirchhoffCoeff, norms: Optional[NormBundle] = None) -> float:
    if _is_zero(u):
        return 0.0
    nb = norms or h1_norms(u.with_derivative())
    return 0.5 * eval_Mhat(c, nb.grad_sq) + 0.5 * prob.m * nb.mass_sq - potential_integral(u, prob)


@dataclass(frozen=True)
class PohozaevCheck:
    residual: float
    G: float  # int (F(u) - m/2 u^2)
    grad_sq: float
    degenerate: bool = False


def pohozaev_check(u: RadialProfile, prob, norms: Optional[NormBundle] = None) -> PohozaevCheck:
    """Relative Pohozaev defect; zero profiles give residual 0 flagged degenerate."""
    if _is_zero(u):
        return PohozaevCheck(0.0, 0.0, 0.0, degenerate=True)
    nb = norms or h1_norms(u.with_derivative())
    G = potential_integral(u, prob) - 0.5 * prob.m * nb.mass_sq
    N = u.N
    if N == 2:
        res = abs(G) / nb.grad_sq if nb.grad_sq > 0 else abs(G)
    else:
        target = (N - 2) / (2.0 * N) * nb.grad_sq
        res = abs(G - target) / target if target > 0 else abs(G)
    return PohozaevCheck(float(res), float(G), nb.grad_sq, nb.grad_sq == 0)


def pohozaev_residual(u: RadialProfile, prob, norms: Optional[NormBundle] = None) -> float:
    return pohozaev_check(u, prob, norms).residual


def energy_derivative(u: RadialProfile, prob, phi: RadialProfile) -> float:
    """Directional derivative int (grad u . grad phi + m u phi - f(u) phi) on u's grid."""
    a, b = u.with_derivative(), phi.with_derivative()
    if a.r.shape != b.r.shape:
        raise ValueError("direction must share the profile's grid")
    g = a.du * b.du + prob.m * a.u * b.u - eval_f(prob.spec, a.u) * b.u
    return integrate_radial(g, u.N, u.r)


# -- levels -------------------------------------------------------------------

def level_from_A(A: float, N: int) -> float:
    """Mountain pass level b from the minimization level A."""
    if N == 2:
        return float(A)
    return (1.0 / N) * ((N - 2) / (2.0 * N)) ** ((N - 2) / 2.0) * (2.0 * A) ** (N / 2.0)


def A_from_level(b: float, N: int) -> float:
    """Inverse of level_from_A."""
    if not b > 0:
        raise ValueError("energy level must be positive")
    if N == 2:
        return float(b)
    return 0.5 * (2.0 * N / (N - 2)) ** ((N - 2) / N) * (N * b) ** (2.0 / N)


def minimization_level(gs) -> float:
    """A recovered from the ground state energy b."""
    return A_from_level(gs.energy, gs.N)


def mv_energy(c: KirchhoffCoeff, t: float, N: int) -> float:
    """1/2 [M^(t) - (1 - 2/N) M(t) t], the Kirchhoff energy at a ground state with ||grad v||^2 = t."""
    return 0.5 * (eval_Mhat(c, t) - (1.0 - 2.0 / N) * eval_M(c, t) * t)


def least_energy_formula(c: KirchhoffCoeff, t: float, N: int) -> float:
    """(1/N) [M(t) / t^{2/(N-2)}]^{(2-N)/2}: local energy read off from the lifted state."""
    if N < 3:
        raise ValueError("formula holds for N >= 3")
    return (1.0 / N) * (eval_M(c, t) / t ** (2.0 / (N - 2))) ** ((2.0 - N) / 2.0)


# -- Sobolev constant ---------------------------------------------------------

def _algebraic_tail(a: float, b: float, R: float, sigma: float) -> float:
    """int_R^inf r^a (1 + r^2/sigma^2)^{-b} dr via the incomplete beta function."""
    alpha = (a + 1.0) / 2.0
    beta = b - alpha
    if not beta > 0:
        raise ValueError("tail integral diverges")
    T = (R / sigma) ** 2
    x = T / (1.0 + T)
    return 0.5 * sigma ** (a + 1.0) * special.beta(alpha, beta) * special.betaincc(alpha, beta, x)


def talenti_ratio(N: int, sigma: float = 1.0, grid=None) -> float:
    """||grad W||_2^2 / ||W||_{2*}^2 for W(r) = (1 + (r/sigma)^2)^{-(N-2)/2}.

    Grid quadrature up to the last node plus the closed-form algebraic tail.
    """
    if N < 3:
        raise ValueError("the Sobolev quotient needs N >= 3")
    r = radial_grid() if grid is None else np.asarray(grid, dtype=float)
    R = float(r[-1])
    q = critical_exponent(N)
    base = 1.0 + (r / sigma) ** 2
    dW = -(N - 2) * r / sigma**2 * base ** (-N / 2.0)
    W = base ** (-(N - 2) / 2.0)
    omega = sphere_area(N)
    grad = grid_quadrature(dW**2 * r ** (N - 1), r)
    grad += (N - 2) ** 2 / sigma**4 * _algebraic_tail(N + 1.0, float(N), R, sigma)
    crit = grid_quadrature(W**q * r ** (N - 1), r)
    crit += _algebraic_tail(N - 1.0, (N - 2) / 2.0 * q, R, sigma)
    return omega * grad / (omega * crit) ** (2.0 / q)


def sobolev_best_constant(N: int) -> float:
    return talenti_ratio(N)


# -- report -------------------------------------------------------------------

def existence_margin(gs) -> float:
    """b - S^{N/2}/N for N >= 3; A - 1/2 for N = 2.  Negative is favourable."""
    if gs.N == 2:
        return minimization_level(gs) - 0.5
    return gs.energy - sobolev_best_constant(gs.N) ** (gs.N / 2.0) / gs.N


@dataclass(frozen=True)
class EnergyReport:
    local_energy: float
    kirchhoff_energy: float
    A_level: float
    b_level: float
    sobolev_S: Optional[float]
    existence_margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def energy_report(gs, c: Optional[KirchhoffCoeff] = None, v: Optional[RadialProfile] = None) -> EnergyReport:
    """Energies of a ground state and, when given, of its Kirchhoff lift v."""
    S = sobolev_best_constant(gs.N) if gs.N >= 3 else None
    kirch = gs.energy
    if c is not None:
        target = v if v is not None else gs.profile
        kirch = kirchhoff_energy(target, gs.problem, c)
    A = minimization_level(gs)
    margin = A - 0.5 if gs.N == 2 else gs.energy - S ** (gs.N / 2.0) / gs.N
    return EnergyReport(gs.energy, kirch, A, gs.energy, S, margin)

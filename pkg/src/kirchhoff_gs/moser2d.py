"""Moser functions in the plane and the energy scan max_t L~(t w_n) < 1/2.

    w~_n(rho) = sqrt(log n / 2pi)               rho <= r/n
              = log(r/rho) / sqrt(2pi log n)     r/n <= rho <= r
              = 0                                rho >= r

has ||grad w~_n||_2 = 1, and ||w~_n||_2^2 log n = r^2/4 (1 - (2 log n + 1)/n^2).
In tau = log(r/rho) the profile is linear, so every integral over the
annulus is taken on a uniform tau grid; the plateau contributes in closed
form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize, special

from .exceptions import EvaluationOverflow, Infeasible, NoInteriorMax
from .nonlinearity import NonlinearitySpec, eval_F
from .radial import RadialProfile, grid_quadrature

EXP_RANGE = 700.0
N_LOG = 2000
N_PLATEAU = 100


def choose_r(beta0: float, m: float) -> float:
    """Radius minimising e^{r^2 m/2} / (pi r^2), checked against beta0."""
    if not m > 0:
        raise ValueError("m must be positive")
    bound = math.e * m / (2.0 * math.pi)
    if not beta0 > bound:
        raise Infeasible(f"beta0={beta0} does not exceed e m / (2 pi) = {bound}")
    r = math.sqrt(2.0 / m)
    assert beta0 > math.exp(0.5 * r * r * m) / (math.pi * r * r)
    return r


@dataclass(frozen=True, eq=False)
class MoserProfile:
    n: int
    r: float
    m: float
    profile: RadialProfile
    grad_sq: float
    mass_sq: float
    normalized: RadialProfile

    @property
    def log_n(self) -> float:
        return math.log(self.n)

    @property
    def norm(self) -> float:
        """Full H^1 norm sqrt(grad_sq + m mass_sq) of the unnormalized profile."""
        return math.sqrt(self.grad_sq + self.m * self.mass_sq)

    @property
    def plateau(self) -> float:
        """Value of the normalized w_n on rho <= r/n."""
        return math.sqrt(self.log_n / (2.0 * math.pi)) / self.norm

    def tau(self) -> np.ndarray:
        return np.linspace(0.0, self.log_n, N_LOG)


def mass_log_closed_form(n: int, r: float) -> float:
    L = math.log(n)
    return 0.25 * r * r * (1.0 - (2.0 * L + 1.0) / n**2)


def _annulus_integral(values_tau, r: float, L: float) -> float:
    """2 pi int_{r/n}^{r} g(rho) rho drho for samples of g on the uniform tau grid."""
    tau = np.linspace(0.0, L, values_tau.size)
    y = values_tau * r * r * np.exp(-2.0 * tau)
    return 2.0 * math.pi * grid_quadrature(y, tau)


def moser_profile(n: int, r: float, m: float = 1.0) -> MoserProfile:
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    if n > 1e8:
        raise ValueError("n above 1e8 cannot be resolved on the log grid")
    if not r > 0:
        raise ValueError("r must be positive")
    L = math.log(n)
    c = 1.0 / math.sqrt(2.0 * math.pi)
    tau = np.linspace(0.0, L, N_LOG)
    w_log = c * tau / math.sqrt(L)
    dw_log = -c / math.sqrt(L) / (r * np.exp(-tau))  # d/drho of log(r/rho)
    inner = r / n
    # the plateau contributes nothing to the gradient
    grad = _annulus_integral(dw_log**2, r, L)
    mass = math.pi * inner**2 * c * c * L + _annulus_integral(w_log**2, r, L)

    rho_plateau = np.linspace(0.0, inner, N_PLATEAU + 1)[:-1]
    rho_log = (r * np.exp(-tau))[::-1]
    grid = np.concatenate([rho_plateau, rho_log])
    u = np.concatenate([np.full(N_PLATEAU, c * math.sqrt(L)), w_log[::-1]])
    du = np.concatenate([np.zeros(N_PLATEAU), dw_log[::-1]])
    du[0] = 0.0
    prof = RadialProfile(2, grid, u, du)
    norm = math.sqrt(grad + m * mass)
    normalized = RadialProfile(2, grid, u / norm, du / norm)
    return MoserProfile(int(n), float(r), float(m), prof, float(grad), float(mass), normalized)


def potential_along_ray(w: MoserProfile, spec: NonlinearitySpec, t: float) -> float:
    """int_{R^2} F(t w_n) dx, with the plateau in closed form."""
    L = w.log_n
    a = w.plateau
    with np.errstate(over="ignore"):
        plateau = float(eval_F(spec, t * a)) * math.pi * (w.r / w.n) ** 2
        vals = eval_F(spec, t * a * w.tau() / L)
    if not math.isfinite(plateau) or plateau > 1e300:
        raise EvaluationOverflow(f"F(t w_n) overflows at t={t}")
    return plateau + _annulus_integral(np.asarray(vals), w.r, L)


def ray_energy(w: MoserProfile, spec: NonlinearitySpec, t: float) -> float:
    """L~(t w_n) = t^2/2 - int F(t w_n); ||w_n|| = 1 in the norm with mass m."""
    return 0.5 * t * t - potential_along_ray(w, spec, t)


def t_overflow(w: MoserProfile) -> float:
    return math.sqrt(EXP_RANGE / (4.0 * math.pi)) / w.plateau


def max_energy_along_ray(w: MoserProfile, spec: NonlinearitySpec, m: Optional[float] = None,
                         n_scan: int = 400):
    """(t*, max_t L~(t w_n)) by a log-spaced scan and golden-section refinement."""
    if spec.N != 2:
        raise ValueError("the Moser scan is two dimensional")
    if m is not None and abs(m - w.m) > 1e-14 * max(1.0, m):
        raise ValueError("profile was normalized with a different m")
    t_hi = t_overflow(w)
    ts = np.geomspace(1e-3, t_hi, n_scan + 1)[:-1]
    vals = []
    for t in ts:
        try:
            vals.append(ray_energy(w, spec, float(t)))
        except EvaluationOverflow:
            break
        # well past an interior maximum the remaining scan is wasted work
        if len(vals) > 2 and vals[-1] < min(0.0, max(vals) - 1.0):
            break
    vals = np.asarray(vals)
    if vals.size < 3:
        raise EvaluationOverflow(f"exponential range exceeded before a maximum was bracketed (n={w.n})")
    k = int(np.argmax(vals))
    if k == vals.size - 1:
        if vals.size < ts.size:
            raise EvaluationOverflow(f"exponential range exceeded before a maximum was bracketed (n={w.n})")
        raise NoInteriorMax(f"energy increases up to the range guard t={t_hi:.4g} (n={w.n})")
    if k == 0:
        raise NoInteriorMax("energy is maximal at the smallest scanned t")
    res = optimize.minimize_scalar(lambda t: -ray_energy(w, spec, t), bracket=(ts[k - 1], ts[k], ts[k + 1]),
                                   method="golden", tol=1e-12)
    t_star = float(res.x)
    return t_star, ray_energy(w, spec, t_star)


@dataclass(frozen=True)
class MoserRow:
    n: int
    t_star: float
    max_value: float
    mass_log: float

    def as_tuple(self):
        return (self.n, self.t_star, self.max_value, self.mass_log)


def criticality_table(spec: NonlinearitySpec, m: float, n_max: int, r: Optional[float] = None,
                      beta0: float = math.inf, stop_at_first: bool = True) -> list:
    """Rows for n = 2, 4, 8, ... <= n_max; stops after the first level below 1/2."""
    if r is None:
        r = choose_r(beta0, m)
    rows = []
    n = 2
    while n <= n_max:
        w = moser_profile(n, r, m)
        try:
            t_star, value = max_energy_along_ray(w, spec)
        except EvaluationOverflow as exc:
            raise EvaluationOverflow(f"overflow at n={n}: {exc}") from exc
        rows.append(MoserRow(n, t_star, value, w.mass_sq * w.log_n))
        if stop_at_first and value < 0.5:
            break
        n *= 2
    return rows


def criticality_scan(spec: NonlinearitySpec, m: float, n_max: int, r: Optional[float] = None,
                     beta0: float = math.inf) -> Optional[int]:
    """First n = 2^j <= n_max with max_t L~(t w_n) < 1/2, or None."""
    rows = criticality_table(spec, m, n_max, r, beta0)
    return rows[-1].n if rows and rows[-1].max_value < 0.5 else None


# -- identities used in the level estimate ------------------------------------

def plateau_lower_bound(w: MoserProfile) -> float:
    """(1/2pi) (log n - d_n m), d_n = ||w~_n||^2 log n: lower bound for w_n^2 on rho <= r/n."""
    return (w.log_n - w.mass_sq * w.log_n * w.m) / (2.0 * math.pi)


def annulus_exp_integral(w: MoserProfile) -> float:
    """int_{B_r minus B_{r/n}} exp(4 pi w~_n^2) dx by quadrature on the tau grid."""
    tau = w.tau()
    return _annulus_integral(np.exp(2.0 * tau**2 / w.log_n), w.r, w.log_n)


def annulus_exp_closed_form(w: MoserProfile) -> float:
    """2 pi r^2 e^{-L/2} sqrt(pi L / 2) erfi(sqrt(L / 2)), L = log n."""
    L = w.log_n
    return 2.0 * math.pi * w.r**2 * math.exp(-L / 2) * math.sqrt(math.pi * L / 2) * float(special.erfi(math.sqrt(L / 2)))


def annulus_lower_bound(w: MoserProfile) -> float:
    return math.pi * w.r**2 * (1.0 - math.exp(-2.0 * w.log_n))

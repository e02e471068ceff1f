"""Positive radial ground states of -Lap u + m u = f(u).

The primary solver shoots on the height s = u(0) of the radial ODE

    u'' + (N-1)/r u' - m u + f(u) = 0,   u(0) = s, u'(0) = 0,

and bisects between an undershoot (u' turns positive while u > 0) and an
overshoot (u crosses zero).  Past the radius where f(u) is negligible the
orbit is replaced by the decaying solution of the linearized equation,
r^{-nu} K_nu(sqrt(m) r) with nu = N/2 - 1, matched in value and slope.  This
removes the exponentially growing mode that no finite-precision shot can
avoid.

An independent finite difference Newton solver (9-point stencils, banded
Jacobian) serves as the oracle and is reused by the semiclassical module.
"""
from __future__ import annotations

import copy
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg, special
from scipy.integrate import solve_ivp

from . import functionals
from .exceptions import (Diverged, EvaluationOverflow, NoBracket, NotGroundState, ShootingError,
                         SingularJacobian, ToleranceError)
from .nonlinearity import CriticalExponential, NonlinearitySpec, eval_df, eval_f, eval_F
from .radial import (ExpTail, NormBundle, RadialProfile, fit_exp_tail, h1_norms, radial_derivative,
                     radial_grid, stencils)


@dataclass(frozen=True)
class LocalProblem:
    spec: NonlinearitySpec
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("m must be positive")

    @property
    def N(self) -> int:
        return self.spec.N


class ShotKind(enum.Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"
    DECAY = "decay"


@dataclass(frozen=True)
class ShotOutcome:
    """Classification of one shot.

    ``kind`` follows the decay envelope first: an orbit that enters it is a
    Decay even if roundoff later tips it over.  ``side`` is the terminal
    event (over/undershoot) that bisection uses; None if neither fired.
    """

    kind: ShotKind
    s: float
    radius: float
    side: Optional[ShotKind] = None
    sol: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class ShootingOptions:
    r_max: float = 60.0
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    s_min: float = 1e-4
    s_max: Optional[float] = None
    scan_factor: float = 1.1
    bracket_rtol: float = 1e-12
    max_bisections: int = 200
    over_eps: float = 1e-14
    under_eps: float = 1e-14
    under_u: float = 1e-10
    decay_r: float = 20.0
    decay_u: float = 1e-8

    def resolved_s_max(self, spec: NonlinearitySpec) -> float:
        if self.s_max is not None:
            return self.s_max
        return 3.0 if isinstance(spec.family, CriticalExponential) else 50.0


@dataclass(frozen=True, eq=False)
class GroundState:
    profile: RadialProfile
    energy: float
    norms: NormBundle
    pohozaev_residual: float
    shoot_height: float
    solver: str
    problem: LocalProblem
    brackets: tuple = ()
    iterations: int = 0

    @property
    def N(self) -> int:
        return self.profile.N

    def summary(self) -> dict:
        return {
            "solver": self.solver,
            "N": self.N,
            "m": self.problem.m,
            "shoot_height": self.shoot_height,
            "energy": self.energy,
            "pohozaev_residual": self.pohozaev_residual,
            "norms": self.norms.to_dict(),
            "brackets": [list(b) for b in self.brackets],
            "iterations": self.iterations,
        }


# -- shooting -----------------------------------------------------------------

def _rhs(prob: LocalProblem):
    N, m, spec = prob.N, prob.m, prob.spec

    def rhs(r, y):
        u, du = y
        return [du, -(N - 1) / r * du + m * u - eval_f(spec, u)]

    return rhs


def _series_start(prob: LocalProblem, s: float):
    N, m = prob.N, prob.m
    fs = eval_f(prob.spec, s)
    if not math.isfinite(fs) or fs > 1e300:
        raise EvaluationOverflow(f"f overflows at shoot height {s}")
    a = m * s - fs  # u'' (0) = a / N
    r0 = 1e-6
    if a != 0.0:
        r0 = min(r0, math.sqrt(1e-8 * 2 * N * s / abs(a)))
    return r0, s + a * r0**2 / (2 * N), a * r0 / N


def shoot(prob: LocalProblem, s: float, opts: ShootingOptions = ShootingOptions()) -> ShotOutcome:
    """Integrate the radial IVP from height s and classify the orbit."""
    if not s > 0:
        raise ValueError("shoot height must be positive")
    r0, u0, du0 = _series_start(prob, s)

    def over(r, y):
        return y[0] + opts.over_eps
    over.terminal, over.direction = True, -1

    def under(r, y):
        return y[1] - opts.under_eps if y[0] > opts.under_u else -1.0
    under.terminal, under.direction = True, 1

    with np.errstate(over="ignore"):
        sol = solve_ivp(_rhs(prob), (r0, opts.r_max), [u0, du0], method=opts.method,
                        rtol=opts.rtol, atol=opts.atol, events=[over, under], dense_output=True)
    if sol.status == -1:
        raise ShootingError(f"integration failed at s={s}: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise EvaluationOverflow(f"non-finite orbit at s={s}")
    if sol.t_events[0].size:
        side, radius = ShotKind.OVERSHOOT, float(sol.t_events[0][0])
    elif sol.t_events[1].size:
        side, radius = ShotKind.UNDERSHOOT, float(sol.t_events[1][0])
    else:
        side, radius = None, float(sol.t[-1])

    kind = side
    r_dec = _decay_radius(prob, sol, opts)
    if r_dec is not None:
        kind, radius = ShotKind.DECAY, r_dec
    elif kind is None:
        raise ShootingError(f"orbit at s={s} reached r_max without classification")
    return ShotOutcome(kind, float(s), radius, side, sol)


def _decay_radius(prob: LocalProblem, sol, opts: ShootingOptions) -> Optional[float]:
    """First radius > decay_r where 0 < u < decay_u and u'/u is a decay rate."""
    r_end = float(sol.t[-1])
    if r_end <= opts.decay_r:
        return None
    rr = np.linspace(opts.decay_r, r_end, 2001)
    u, du = sol.sol(rr)
    sm = math.sqrt(prob.m)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = (u > 0) & (u < opts.decay_u) & (du / u >= -2 * sm) & (du / u <= -0.5 * sm)
    hit = np.flatnonzero(ok)
    return float(rr[hit[0]]) if hit.size else None


def _side(prob, s, opts) -> ShotOutcome:
    out = shoot(prob, s, opts)
    if out.side is None:
        raise ShootingError(f"orbit at s={s} neither overshoots nor undershoots")
    return out


def scan_brackets(prob: LocalProblem, opts: ShootingOptions = ShootingOptions()) -> list:
    """Undershoot -> overshoot transitions on a geometric scan of s.

    Heights with F(s) < m s^2 / 2 are undershoots without integration: the
    energy u'^2/2 + F(u) - m u^2/2 decreases along orbits, so the orbit can
    neither reach u = 0 nor decay.
    """
    s_max = opts.resolved_s_max(prob.spec)
    n = int(math.ceil(math.log(s_max / opts.s_min) / math.log(opts.scan_factor)))
    heights = opts.s_min * opts.scan_factor ** np.arange(n + 1)
    heights[-1] = s_max
    brackets, prev = [], None
    for s in heights:
        if eval_F(prob.spec, s) < 0.5 * prob.m * s * s:
            kind = ShotKind.UNDERSHOOT
        else:
            kind = _side(prob, float(s), opts).side
        if prev is not None and prev[1] is ShotKind.UNDERSHOOT and kind is ShotKind.OVERSHOOT:
            brackets.append((prev[0], float(s)))
        prev = (float(s), kind)
    return brackets


def bisect_height(prob: LocalProblem, lo: float, hi: float, opts: ShootingOptions = ShootingOptions()):
    """Shrink an (undershoot, overshoot) bracket to relative width bracket_rtol.

    Returns (lo, hi, iterations, history) where history lists every bracket.
    """
    history = [(lo, hi)]
    it = 0
    while hi - lo > opts.bracket_rtol * lo:
        if it >= opts.max_bisections:
            raise ToleranceError("bisection did not converge", bracket=(lo, hi))
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise ToleranceError("bisection stalled at floating point resolution", bracket=(lo, hi))
        if _side(prob, mid, opts).side is ShotKind.UNDERSHOOT:
            lo = mid
        else:
            hi = mid
        history.append((lo, hi))
        it += 1
    return lo, hi, it, history


def _modes(N: int, m: float, r):
    """Decaying and growing solutions of the linearized radial equation."""
    nu = N / 2.0 - 1.0
    sm = math.sqrt(m)
    x = sm * np.asarray(r, dtype=float)
    scale = np.asarray(r, dtype=float) ** (-nu)
    kd = scale * special.kve(nu, x)
    kd1 = -sm * scale * special.kve(nu + 1, x)
    ig = scale * special.ive(nu, x)
    ig1 = sm * scale * special.ive(nu + 1, x)
    # exponentially scaled: true values are kd * e^{-x}, ig * e^{x}
    return kd, kd1, ig, ig1, x


def _match_radius(prob: LocalProblem, sol, r_end: float, rel: float = 1e-8) -> float:
    rr = np.linspace(min(1.0, 0.5 * r_end), r_end, 8001)
    u = sol.sol(rr)[0]
    ok = (u > 0) & (eval_f(prob.spec, u) <= rel * prob.m * u)
    if not ok.any():
        raise ShootingError("orbit never reaches the linear far field")
    return float(rr[np.argmax(ok)])


def profile_from_shot(prob: LocalProblem, shot: ShotOutcome, grid=None) -> RadialProfile:
    """Sample a shot on the grid, continuing it with the decaying linear mode."""
    N, m = prob.N, prob.m
    grid = radial_grid() if grid is None else np.asarray(grid, dtype=float)
    r_end = shot.radius if shot.side is not None else float(shot.sol.t[-1])
    rm = _match_radius(prob, shot.sol, r_end)
    um, dum = shot.sol.sol(rm)
    kd, kd1, ig, ig1, x = _modes(N, m, rm)
    # u = A K + B I at rm; only A is kept
    det = kd * ig1 - kd1 * ig
    A = (um * ig1 - dum * ig) / det * math.exp(x)

    u = np.empty_like(grid)
    du = np.empty_like(grid)
    inner = grid <= rm
    u[0], du[0] = shot.s, 0.0
    pos = inner.copy()
    pos[0] = False
    if pos.any():
        u[pos], du[pos] = shot.sol.sol(grid[pos])
    outer = ~inner
    if outer.any():
        kd_o, kd1_o, _, _, xo = _modes(N, m, grid[outer])
        decay = np.exp(-xo)
        u[outer] = A * kd_o * decay
        du[outer] = A * kd1_o * decay
    tail = fit_exp_tail(grid, u, N, 1e-14, 1e-4)
    return RadialProfile(N, grid, u, du, tail)


def ground_state_from_profile(prob: LocalProblem, profile: RadialProfile, solver: str,
                              brackets=(), iterations: int = 0) -> GroundState:
    profile = profile.with_derivative()
    norms = h1_norms(profile)
    energy = functionals.local_energy(profile, prob, norms=norms)
    poh = functionals.pohozaev_residual(profile, prob, norms=norms)
    return GroundState(profile, energy, norms, poh, float(profile.u[0]), solver, prob,
                       tuple(brackets), iterations)


def find_ground_state(prob: LocalProblem, opts: ShootingOptions = ShootingOptions(),
                      grid=None) -> GroundState:
    """Ground state by shooting; the lowest undershoot/overshoot bracket is used."""
    brackets = scan_brackets(prob, opts)
    if not brackets:
        raise NoBracket(f"no undershoot/overshoot change for s in [{opts.s_min}, "
                        f"{opts.resolved_s_max(prob.spec)}]")
    lo, hi, it, _ = bisect_height(prob, *brackets[0], opts)
    shot = shoot(prob, lo, opts)
    profile = profile_from_shot(prob, shot, grid)
    return ground_state_from_profile(prob, profile, "shooting", brackets, it)


# -- finite difference Newton -------------------------------------------------

@dataclass
class NewtonReport:
    iterations: int
    residual: float  # max |R| at the final iterate
    scaled_residual: float  # max |R| h^2 / diffusion
    step: float
    history: list


class RadialOperator:
    """Discrete u -> D (u'' + (N-1)/r u') - V u + f(u) with u(r_K) = 0.

    Unknowns are u_0..u_{K-1}; u'(0) = 0 is built into the even reflection
    of the stencils, and at r = 0 the Laplacian is N u''(0).
    """

    def __init__(self, N: int, r, spec: NonlinearitySpec, potential, diffusion: float = 1.0):
        r = np.asarray(r, dtype=float)
        self.N, self.r, self.spec = N, r, spec
        self.K = r.size - 1
        idx, mirrored, w = stencils(r, order=2)
        idx, w1, w2 = idx[: self.K], w[1][: self.K], w[2][: self.K]
        rr = r[: self.K]
        with np.errstate(divide="ignore"):
            c1 = np.where(rr > 0, (N - 1) / np.where(rr > 0, rr, 1.0), 0.0)
        lap = w2 + c1[:, None] * w1
        lap[0] = N * w2[0]
        self.lap = lap
        self.idx = idx
        self.V = np.broadcast_to(np.asarray(potential, dtype=float), r.shape)[: self.K].copy()
        self.diffusion = float(diffusion)
        off = idx - np.arange(self.K)[:, None]
        keep = idx < self.K
        self.lower = int(-off[keep].min())
        self.upper = int(off[keep].max())
        band = np.zeros((self.lower + self.upper + 1, self.K))
        np.add.at(band, (self.upper - off[keep], idx[keep]), lap[keep])
        self._lap_band = band
        self.h2 = float(np.min(np.diff(r))) ** 2

    def with_coefficients(self, diffusion=None, potential=None, spec=None) -> "RadialOperator":
        """Copy sharing the stencils, with new D, V or f."""
        op = copy.copy(self)
        if diffusion is not None:
            op.diffusion = float(diffusion)
        if potential is not None:
            op.V = np.broadcast_to(np.asarray(potential, dtype=float), self.r.shape)[: self.K].copy()
        if spec is not None:
            op.spec = spec
        return op

    def laplacian(self, u_full):
        return np.einsum("ij,ij->i", self.lap, u_full[self.idx])

    def residual(self, u):
        full = np.append(u, 0.0)
        return self.diffusion * self.laplacian(full) - self.V * u + eval_f(self.spec, u)

    def banded_jacobian(self, u):
        ab = self.diffusion * self._lap_band
        ab[self.upper] += -self.V + eval_df(self.spec, u)
        return ab


def _banded_solve(op: RadialOperator, ab, rhs, it: int):
    try:
        with np.errstate(all="raise"):
            return linalg.solve_banded((op.lower, op.upper), ab, rhs, check_finite=True)
    except (linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        raise SingularJacobian(f"Jacobian solve failed at iteration {it}: {exc}") from exc


def newton_solve(op: RadialOperator, u0, tol: float = 1e-10, step_tol: float = 1e-10,
                 max_iter: int = 50, armijo: float = 1e-4, backtrack: float = 0.5,
                 max_backtracks: int = 30):
    """Damped Newton on op.residual.

    The line search is Armijo backtracking on the Newton-scaled merit
    phi(u) = ||J_k^{-1} R(u)||^2 / 2 with J_k frozen at the current iterate.
    The raw ||R||^2 is dominated by the stiff 1/h^2 rows at the spike and
    rejects productive steps.  Steps below 1e-8 ||u||_inf are taken in full.

    Converged when the h^2-scaled residual is below ``tol`` and the last
    Newton step is below ``step_tol`` relative to ||u||_inf, or has stopped
    shrinking inside the quadratic regime (roundoff floor of the 1/h^2
    terms).
    """
    u = np.array(u0[: op.K], dtype=float)
    R = op.residual(u)
    history = []
    step = prev = math.inf
    for it in range(1, max_iter + 1):
        ab = op.banded_jacobian(u)
        delta = _banded_solve(op, ab, -R, it)
        scale = max(float(np.max(np.abs(u))), 1e-300)
        step = float(np.max(np.abs(delta)))
        alpha = 1.0
        if step <= 1e-8 * scale:
            u = u + delta
            R = op.residual(u)
        else:
            phi = 0.5 * float(delta @ delta)
            for _ in range(max_backtracks):
                trial = u + alpha * delta
                with np.errstate(over="ignore", invalid="ignore"):
                    Rt = op.residual(trial)
                if np.all(np.isfinite(Rt)):
                    bar = _banded_solve(op, ab, -Rt, it)
                    # an overflowing merit is just a rejected trial
                    with np.errstate(over="ignore", invalid="ignore"):
                        merit = 0.5 * float(bar @ bar)
                    if merit <= (1.0 - 2.0 * armijo * alpha) * phi:
                        break
                alpha *= backtrack
            else:
                raise Diverged(f"line search failed {max_backtracks} times at iteration {it}")
            u, R = trial, Rt
        res = float(np.max(np.abs(R)))
        history.append((alpha, step, res))
        small = alpha * step <= step_tol * scale
        floor = alpha == 1.0 and step <= 1e-8 * scale and step > 0.5 * prev
        prev = step
        if res * op.h2 / op.diffusion <= tol and (small or floor):
            return np.append(u, 0.0), NewtonReport(it, res, res * op.h2 / op.diffusion, step, history)
    raise Diverged(f"no convergence in {max_iter} Newton iterations")


def fd_newton_solve(prob: LocalProblem, init: RadialProfile, tol: float = 1e-10,
                    full_output: bool = False, **kw):
    """Oracle solve of -Lap u + m u = f(u) on init's grid with u(r_max) = 0."""
    if init.N != prob.N:
        raise ValueError("initial profile has the wrong dimension")
    if not np.any(init.u > 0):
        raise NotGroundState("zero initial guess: u = 0 already solves the equation")
    op = RadialOperator(prob.N, init.r, prob.spec, prob.m)
    try:
        u, rep = newton_solve(op, init.u, tol=tol, **kw)
    except Diverged as exc:
        raise NotGroundState(f"Newton iteration did not reach a positive solution: {exc}") from exc
    if np.max(u) <= 1e-8 or np.min(u) < -1e-8 * np.max(u):
        raise NotGroundState("Newton converged to a trivial or sign-changing solution")
    du = radial_derivative(u, op.r)
    du[0] = 0.0
    prof = RadialProfile(prob.N, op.r, u, du, fit_exp_tail(op.r, u, prob.N, 1e-14, 1e-4))
    return (prof, rep) if full_output else prof


def fd_ground_state(prob: LocalProblem, init: RadialProfile, **kw) -> GroundState:
    prof, rep = fd_newton_solve(prob, init, full_output=True, **kw)
    return ground_state_from_profile(prob, prof, "fd_newton", iterations=rep.iterations)


def pde_residual(u: RadialProfile, prob: LocalProblem, diffusion: float = 1.0, potential=None,
                 width: int = 11) -> np.ndarray:
    """|D (u'' + (N-1)/r u') - V u + f(u)| / (1 + |f(u)|) at every node but the last.

    u'' comes from ``width``-point differences of the stored u' (odd
    reflection at the origin), where the Laplacian is N u''(0).
    """
    p = u.with_derivative()
    N, r = p.N, p.r
    d2 = radial_derivative(p.du, r, order=1, parity=-1, width=width)
    with np.errstate(divide="ignore", invalid="ignore"):
        lap = np.where(r > 0, d2 + (N - 1) / np.where(r > 0, r, 1.0) * p.du, N * d2)
    V = prob.m if potential is None else np.asarray(potential, dtype=float)
    fu = eval_f(prob.spec, p.u)
    res = np.abs(diffusion * lap - V * p.u + fu) / (1.0 + np.abs(fu))
    return res[:-1]

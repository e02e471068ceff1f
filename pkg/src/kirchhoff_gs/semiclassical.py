"""Semiclassical Kirchhoff problem with a radial potential well.

The scaled unknown w(x) = v(eps x) of

    -eps^2 M(eps^{2-N} ||grad v||^2) Lap v + V(x) v = f_k(v)

solves -M(||grad w||^2) Lap w + V(eps x) w = f_k(w).  For a given value
theta of ||grad w||^2 this is a local problem with diffusion M(theta), solved
by finite difference Newton; theta itself is found by a damped fixed point.
Only radial wells are handled, so the spike sits at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .coefficient import KirchhoffCoeff, eval_M, inf_M
from .exceptions import KirchhoffError, OuterDiverged, WindowEmpty
from .groundstate import GroundState, LocalProblem, RadialOperator, newton_solve, pde_residual
from .nonlinearity import NonlinearitySpec, max_on_interval, truncate
from .radial import RadialProfile, h1_distance, h1_norms, radial_derivative, rescale_profile, sup_distance
from .rescaling import lift


@dataclass(frozen=True)
class PotentialSpec:
    """Radial potential V(rho) with its minimum m at the origin and O = B(0, O_radius)."""

    m: float
    well: Callable
    O_radius: float = 1.0
    label: str = "custom"
    params: Optional[dict] = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("m must be positive")
        if abs(float(self.well(0.0)) - self.m) > 1e-12 * self.m:
            raise ValueError("V(0) must equal m")

    @property
    def boundary_min(self) -> float:
        return float(self.well(self.O_radius))

    def V(self, rho):
        return np.asarray(self.well(np.asarray(rho, dtype=float)), dtype=float)

    def inf_V(self, rho_max: float = 1e4) -> float:
        rho = np.concatenate([[0.0], np.geomspace(1e-6, rho_max, 2001)])
        return float(np.min(self.V(rho)))

    def check(self) -> dict:
        """Sampled (V1) inf V > 0 and (V2) m < min over the boundary of O."""
        v0 = self.inf_V()
        return {"V1": v0 > 0, "V2": self.m < self.boundary_min, "V0": v0, "boundary_min": self.boundary_min}

    def to_dict(self) -> dict:
        if self.params is None:
            raise ValueError("custom wells cannot be serialized")
        return {"family": self.label, **self.params, "O_radius": self.O_radius}


def rational_well(m: float = 1.0, depth: float = 1.0, O_radius: float = 1.0) -> PotentialSpec:
    """V(rho) = m + depth rho^2 / (1 + rho^2)."""
    return PotentialSpec(m, lambda rho: m + depth * np.square(rho) / (1.0 + np.square(rho)), O_radius,
                         "rational", {"m": m, "depth": depth})


def potential_from_dict(d: dict) -> PotentialSpec:
    allowed = {"family", "m", "depth", "O_radius"}
    extra = set(d) - allowed
    if extra:
        raise ValueError(f"unknown potential keys: {sorted(extra)}")
    if d.get("family", "rational") != "rational":
        raise ValueError(f"unknown potential family {d.get('family')!r}")
    return rational_well(float(d.get("m", 1.0)), float(d.get("depth", 1.0)), float(d.get("O_radius", 1.0)))


@dataclass(frozen=True, eq=False)
class SemiclassicalResult:
    eps: float
    profile: RadialProfile
    spike_height: float
    x_eps_dist: float
    h1_dist_to_limit: float
    sup_dist_to_limit: float
    decay_C: float
    decay_c: float
    reference_rate: float
    coefficient: float
    theta: float
    outer_iterations: int
    theta_history: tuple = field(default=(), repr=False)

    def row(self) -> dict:
        return {
            "eps": self.eps,
            "x_eps_dist": self.x_eps_dist,
            "sup_dist": self.sup_dist_to_limit,
            "h1_dist": self.h1_dist_to_limit,
            "spike": self.spike_height,
            "coeff": self.coefficient,
            "decay_C": self.decay_C,
            "decay_c": self.decay_c,
        }


@dataclass(frozen=True, eq=False)
class LimitState:
    """Kirchhoff limit ground state on the sweep grid, plus the truncation data."""

    ground_state: GroundState
    profile: RadialProfile
    spec: NonlinearitySpec  # truncated at k
    kappa: float
    k: float
    theta: float


def truncation_level(gs: GroundState, kappa_factor: float = 1.1, k_factor: float = 1.01):
    """kappa = 1.1 ||U||_inf and k = 1.01 max_{[0, kappa]} f."""
    kappa = kappa_factor * gs.norms.sup_norm
    return kappa, k_factor * max_on_interval(gs.problem.spec, kappa)


def _profile(N, r, w, tail=None) -> RadialProfile:
    du = radial_derivative(w, r)
    du[0] = 0.0
    return RadialProfile(N, r, w, du, tail)


def _fixed_point(op: RadialOperator, c: KirchhoffCoeff, w0: np.ndarray, theta0: float,
                 damping: float = 0.5, tol: float = 1e-10, max_outer: int = 200):
    N, r = op.N, op.r
    theta, w = theta0, np.asarray(w0, dtype=float)
    history = [theta]
    for it in range(1, max_outer + 1):
        w, _ = newton_solve(op.with_coefficients(diffusion=eval_M(c, theta)), w)
        theta_new = h1_norms(_profile(N, r, w)).grad_sq
        if abs(theta_new - theta) <= tol * (1.0 + theta):
            history.append(theta_new)
            return w, theta, it, history
        theta = theta + damping * (theta_new - theta)
        history.append(theta)
    raise OuterDiverged(f"theta fixed point did not converge in {max_outer} iterations")


def limit_state(gs: GroundState, c: KirchhoffCoeff, truncate_spec: bool = True, **kw) -> LimitState:
    """Kirchhoff limit ground state, re-solved on the lifted grid by the same discretization."""
    L = lift(gs, c)
    kappa, k = truncation_level(gs)
    spec = truncate(gs.problem.spec, k) if truncate_spec else gs.problem.spec
    op = RadialOperator(gs.N, L.v.r, spec, gs.problem.m)
    w, theta, _, _ = _fixed_point(op, c, L.v.u, L.grad_sq_v, **kw)
    return LimitState(gs, _profile(gs.N, op.r, w), spec, kappa, k, theta)


def decay_fit(res, lo: float = 1e-8, hi: float = 1e-3):
    """(C, c) from a least squares line through log w on the window lo <= w <= hi."""
    prof = res.profile if hasattr(res, "profile") else res
    r, w = prof.r, prof.u
    sel = (w >= lo) & (w <= hi)
    if np.count_nonzero(sel) < 2:
        raise WindowEmpty(f"no samples with {lo} <= w <= {hi}")
    slope, intercept = np.polyfit(r[sel], np.log(w[sel]), 1)
    return float(math.exp(intercept)), float(-slope)


def far_field_rate(prof: RadialProfile, pot: PotentialSpec, eps: float, diffusion: float,
                   lo: float = 1e-8, hi: float = 1e-3) -> float:
    """Slope that decay_fit would return on the linearized far field.

    The decaying solution of D (w'' + (N-1)/rho w') = V(eps rho) w behaves like
    exp(-int k) rho^{-(N-1)/2} k^{-1/2}, k = sqrt(V(eps rho) / D); its log is
    fitted by a line on the same window as the data.
    """
    r, w = prof.r, prof.u
    sel = (w >= lo) & (w <= hi)
    if np.count_nonzero(sel) < 2:
        raise WindowEmpty(f"no samples with {lo} <= w <= {hi}")
    k = np.sqrt(pot.V(eps * r) / diffusion)
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (k[1:] + k[:-1]) * np.diff(r))])
    with np.errstate(divide="ignore"):
        logw = -phase - 0.5 * (prof.N - 1) * np.log(r) - 0.5 * np.log(k)
    slope, _ = np.polyfit(r[sel], logw[sel], 1)
    return float(-slope)


def solve_eps(pot: PotentialSpec, spec: NonlinearitySpec, c: KirchhoffCoeff, eps: float,
              init: RadialProfile, limit: Optional[LimitState] = None, damping: float = 0.5,
              tol: float = 1e-10, max_outer: int = 200, operator: Optional[RadialOperator] = None
              ) -> SemiclassicalResult:
    """Solve the scaled eps-problem on init's grid, warm-started from init."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    N, r = init.N, init.r
    op = operator if operator is not None else RadialOperator(N, r, spec, pot.m)
    op = op.with_coefficients(potential=pot.V(eps * r), spec=spec)
    theta0 = h1_norms(init.with_derivative()).grad_sq
    w, theta, it, hist = _fixed_point(op, c, init.u, theta0, damping, tol, max_outer)
    prof = _profile(N, r, w)
    D = eval_M(c, theta)
    C_fit, c_fit = decay_fit(prof)
    h1d = sud = math.nan
    if limit is not None:
        h1d = h1_distance(prof, limit.profile)
        sud = sup_distance(prof, limit.profile)
    i_max = int(np.argmax(w))
    return SemiclassicalResult(float(eps), prof, float(w[i_max]), float(eps * r[i_max]), h1d, sud, C_fit, c_fit,
                               far_field_rate(prof, pot, eps, D), D, theta, it, tuple(hist))


def unscaled_residual(res: SemiclassicalResult, pot: PotentialSpec, spec: NonlinearitySpec,
                      c: KirchhoffCoeff) -> float:
    """Residual of -eps^2 M(eps^{2-N} ||grad v||^2) Lap v + V v - f(v) for v(y) = w(y / eps)."""
    if not res.eps > 0:
        raise ValueError("the unscaled problem needs eps > 0")
    eps, N = res.eps, res.profile.N
    v = rescale_profile(res.profile, eps)
    theta = eps ** (2 - N) * h1_norms(v).grad_sq
    D = eps**2 * eval_M(c, theta)
    return float(np.max(pde_residual(v, LocalProblem(spec, pot.m), diffusion=D, potential=pot.V(v.r))))


@dataclass
class Sweep:
    results: list
    failed_eps: Optional[float] = None
    error: Optional[str] = None

    def __iter__(self):
        return iter(self.results)

    def __len__(self):
        return len(self.results)

    def __getitem__(self, i):
        return self.results[i]


def continuation_sweep(pot: PotentialSpec, spec: NonlinearitySpec, c: KirchhoffCoeff, eps_list,
                       limit: LimitState, **kw) -> Sweep:
    """Solve for each eps in descending order, warm-starting from the previous solution."""
    eps_list = [float(e) for e in eps_list]
    if any(a < b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be descending")
    op = RadialOperator(limit.profile.N, limit.profile.r, spec, pot.m)
    out, init = [], limit.profile
    for eps in eps_list:
        try:
            res = solve_eps(pot, spec, c, eps, init, limit=limit, operator=op, **kw)
        except (KirchhoffError, FloatingPointError) as exc:
            return Sweep(out, eps, f"{type(exc).__name__}: {exc}")
        out.append(res)
        init = res.profile
    return Sweep(out)


def _decreasing(values) -> list:
    return [bool(b < a) for a, b in zip(values, values[1:])]


def concentration_diagnostics(results, U: GroundState, kappa: Optional[float] = None) -> dict:
    """Per-eps rows plus monotone-trend flags (as eps decreases) and the spike range check."""
    results = list(results)
    if not results:
        raise ValueError("no results to diagnose")
    rows = [r.row() for r in results]
    kappa = kappa if kappa is not None else 1.1 * U.norms.sup_norm
    h1 = [r.h1_dist_to_limit for r in results]
    sup = [r.sup_dist_to_limit for r in results]
    flags = {
        "h1_decreasing": _decreasing(h1),
        "sup_decreasing": _decreasing(sup),
        "spike_below_kappa": [r.spike_height < kappa for r in results],
        "x_eps_at_minimum": [r.x_eps_dist == 0.0 for r in results],
    }
    flags["non_monotone_rows"] = [i + 1 for i, ok in enumerate(flags["h1_decreasing"]) if not ok]
    return {"rows": rows, "flags": flags, "kappa": kappa, "limit_sup_norm": U.norms.sup_norm}


def coefficient_bounds(results, c: KirchhoffCoeff, limit: LimitState) -> dict:
    coeffs = [r.coefficient for r in results]
    upper = 10.0 * eval_M(c, limit.theta)
    m0 = inf_M(c)
    return {"m0": m0, "upper": upper, "min": min(coeffs), "max": max(coeffs),
            "within": all(m0 <= x <= upper for x in coeffs)}


def untruncated_change(res: SemiclassicalResult, pot: PotentialSpec, spec: NonlinearitySpec,
                       c: KirchhoffCoeff) -> float:
    """Node-wise change when the converged state is re-solved with the untruncated f."""
    full = replace(spec, truncation=None, t_k=math.inf)
    again = solve_eps(pot, full, c, res.eps, res.profile)
    return float(np.max(np.abs(again.profile.u - res.profile.u)))

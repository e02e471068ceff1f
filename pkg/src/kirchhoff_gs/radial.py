"""Radial grids and profiles, quadrature over R^N and H^1 norms.

A radial function u(|x|) is stored as samples (r_i, u_i, u'_i) on a grid
starting at r = 0.  Integrals over R^N reduce to

    int_{R^N} g(|x|) dx = omega_{N-1} int_0^inf g(r) r^{N-1} dr,

with omega_{N-1} = 2 pi^{N/2} / Gamma(N/2) the area of the unit sphere.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special
from scipy.interpolate import BPoly

from .exceptions import QuadratureError, QuadratureOverflow

OVERFLOW_GUARD = 1e300
STENCIL_WIDTH = 9


def sphere_area(N: int) -> float:
    """Area of the unit sphere in R^N (2 pi for N = 2, 4 pi for N = 3)."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def radial_grid(h: float = 1e-3, r_uniform: float = 10.0, r_max: float = 60.0,
                growth: float = 1.001) -> np.ndarray:
    """Uniform step h on [0, r_uniform], then geometrically stretched to r_max."""
    n = int(round(r_uniform / h))
    uniform = np.arange(n + 1) * h
    if r_max <= uniform[-1] * (1 + 1e-12):
        return uniform
    span = r_max - uniform[-1]
    J = int(math.ceil(math.log1p(span * (growth - 1.0) / (h * growth)) / math.log(growth)))
    steps = h * growth ** np.arange(1, J + 1)
    steps *= span / steps.sum()
    outer = uniform[-1] + np.cumsum(steps)
    outer[-1] = r_max
    return np.concatenate([uniform, outer])


def uniform_grid(r_max: float = 60.0, n: int = 60001) -> np.ndarray:
    return np.arange(n) * (r_max / (n - 1))


@dataclass(frozen=True)
class ExpTail:
    """Far-field model u(r) ~ C r^{-(N-1)/2} exp(-c r) beyond the last node."""

    C: float
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("tail decay rate must be positive")

    def __call__(self, r, N):
        r = np.asarray(r, dtype=float)
        return self.C * r ** (-(N - 1) / 2.0) * np.exp(-self.c * r)

    def derivative(self, r, N):
        r = np.asarray(r, dtype=float)
        return -self(r, N) * (self.c + (N - 1) / (2.0 * r))


@dataclass(frozen=True)
class NormBundle:
    grad_sq: float
    mass_sq: float
    sup_norm: float

    def to_dict(self):
        return {"grad_sq": self.grad_sq, "mass_sq": self.mass_sq, "sup_norm": self.sup_norm}


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples of a radial function u and (optionally) u' on a grid with r_0 = 0."""

    N: int
    r: np.ndarray
    u: np.ndarray
    du: Optional[np.ndarray] = None
    tail: Optional[ExpTail] = None

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        u = np.array(self.u, dtype=float)
        if self.N < 2:
            raise ValueError("dimension must be >= 2")
        if r.ndim != 1 or r.shape != u.shape or r.size < 2:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("grid must start at 0 and increase strictly")
        r.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "u", u)
        if self.du is not None:
            du = np.array(self.du, dtype=float)
            if du.shape != r.shape:
                raise ValueError("derivative samples must match the grid")
            if abs(du[0]) > 1e-8 * (1.0 + np.max(np.abs(du))):
                raise ValueError("radial regularity requires u'(0) = 0")
            du[0] = 0.0
            du.flags.writeable = False
            object.__setattr__(self, "du", du)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def with_derivative(self) -> "RadialProfile":
        """Return a copy whose u' is filled in by high-order differences if missing."""
        if self.du is not None:
            return self
        return replace(self, du=radial_derivative(self.u, self.r, order=1))

    def second_derivative(self) -> np.ndarray:
        if self.du is not None:
            return radial_derivative(self.du, self.r, order=1, parity=-1)
        return radial_derivative(self.u, self.r, order=2)

    def __call__(self, rho):
        return _evaluate(self, np.asarray(rho, dtype=float))[0]


# -- finite difference weights ------------------------------------------------

def fd_weights(x0, xs, order: int) -> np.ndarray:
    """Fornberg weights for derivatives 0..order at x0 from nodes xs.

    Vectorised over rows: x0 has shape (n,), xs shape (n, p); returns an
    array of shape (order + 1, n, p).
    """
    x0 = np.asarray(x0, dtype=float)
    xs = np.asarray(xs, dtype=float)
    n, p = xs.shape
    c = np.zeros((order + 1, n, p))
    c[0, :, 0] = 1.0
    c1 = np.ones(n)
    c4 = xs[:, 0] - x0
    for i in range(1, p):
        mn = min(i, order)
        c2 = np.ones(n)
        c5 = c4
        c4 = xs[:, i] - x0
        for j in range(i):
            c3 = xs[:, i] - xs[:, j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, :, i] = c1 * (k * c[k - 1, :, i - 1] - c5 * c[k, :, i - 1]) / c2
                c[0, :, i] = -c1 * c5 * c[0, :, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, :, j] = (c4 * c[k, :, j] - k * c[k - 1, :, j]) / c3
            c[0, :, j] = c4 * c[0, :, j] / c3
        c1 = c2
    return c


def stencils(r: np.ndarray, width: int = STENCIL_WIDTH, order: int = 2):
    """Centred stencils on a radial grid.

    Nodes left of the origin are mirrored (u(-r) = +-u(r)); near the outer
    end the window is shifted inwards.  Returns (index, mirrored, weights)
    with weights[k] the k-th derivative weights.
    """
    K = r.size - 1
    if r.size < width:
        raise ValueError(f"grid needs at least {width} nodes")
    half = width // 2
    i = np.arange(r.size)
    start = np.minimum(i - half, K - width + 1)
    idx = start[:, None] + np.arange(width)[None, :]
    mirrored = idx < 0
    idx = np.abs(idx)
    pos = np.where(mirrored, -r[idx], r[idx])
    return idx, mirrored, fd_weights(r, pos, order)


def radial_derivative(values, r, order: int = 1, parity: int = 1, width: int = STENCIL_WIDTH):
    """d^order/dr^order of radial samples; parity = +1 for even data (u), -1 for odd (u')."""
    values = np.asarray(values, dtype=float)
    idx, mirrored, w = stencils(np.asarray(r, dtype=float), width, order)
    v = values[idx] * np.where(mirrored, float(parity), 1.0)
    return np.einsum("ij,ij->i", w[order], v)


# -- quadrature ---------------------------------------------------------------

def _uniform_prefix(r: np.ndarray) -> int:
    d = np.diff(r)
    bad = np.flatnonzero(np.abs(d - d[0]) > 1e-9 * d[0])
    return int(bad[0]) if bad.size else d.size


def _check_samples(y):
    if np.any(np.isnan(y)):
        raise QuadratureError("non-finite integrand samples")
    if np.any(~np.isfinite(y)) or np.any(np.abs(y) > OVERFLOW_GUARD):
        raise QuadratureOverflow("integrand exceeds the 1e300 overflow guard")


def grid_quadrature(y, r) -> float:
    """int y dr over the grid.

    Composite Simpson with one Richardson step (Boole's rule) on the uniform
    leading block, plain composite Simpson on the stretched remainder.
    """
    y = np.asarray(y, dtype=float)
    r = np.asarray(r, dtype=float)
    _check_samples(y)
    k = _uniform_prefix(r)
    k4 = k - k % 4
    total = 0.0
    if k4 >= 4:
        h = r[1] - r[0]
        s1 = integrate.simpson(y[: k4 + 1], dx=h)
        s2 = integrate.simpson(y[: k4 + 1 : 2], dx=2 * h)
        total += s1 + (s1 - s2) / 15.0
    else:
        k4 = 0
    if r.size - 1 > k4:
        total += integrate.simpson(y[k4:], x=r[k4:])
    return float(total)


def integrate_radial(g, N: int, grid=None) -> float:
    """omega_{N-1} int g(r) r^{N-1} dr.

    ``g`` is a callable or an array of samples on ``grid``.  Without a grid a
    callable is integrated adaptively over [0, inf).
    """
    omega = sphere_area(N)
    if grid is None:
        if not callable(g):
            raise ValueError("samples need a grid")
        val, _ = integrate.quad(lambda s: g(s) * s ** (N - 1), 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=500)
        if not math.isfinite(val):
            raise QuadratureError("non-finite integral")
        return omega * val
    r = np.asarray(grid, dtype=float)
    y = g(r) if callable(g) else np.asarray(g, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        integrand = np.asarray(y, dtype=float) * r ** (N - 1)
    return omega * grid_quadrature(integrand, r)


def _tail_integrals(tail: ExpTail, R: float, N: int):
    C, c = tail.C, tail.c
    e = math.exp(-2 * c * R)
    mass = C * C * e / (2 * c)
    E1 = special.exp1(2 * c * R)
    k = (N - 1) / 2.0
    grad = C * C * (c * e / 2 + 2 * c * k * E1 + k * k * (e / R - 2 * c * E1))
    return grad, mass


def h1_norms(u: RadialProfile) -> NormBundle:
    """||grad u||_2^2, ||u||_2^2 (tail included) and ||u||_inf."""
    if u.du is None:
        raise ValueError("profile carries no derivative samples")
    N, r = u.N, u.r
    grad = integrate_radial(u.du**2, N, r)
    mass = integrate_radial(u.u**2, N, r)
    if u.tail is not None:
        tg, tm = _tail_integrals(u.tail, u.r_max, N)
        grad += sphere_area(N) * tg
        mass += sphere_area(N) * tm
    return NormBundle(float(grad), float(mass), float(np.max(np.abs(u.u))))


def h1_distance(u: RadialProfile, v: RadialProfile) -> float:
    """H^1 distance of two profiles sampled on the same grid."""
    if u.r.shape != v.r.shape or np.max(np.abs(u.r - v.r)) > 1e-12 * u.r_max:
        raise ValueError("profiles live on different grids; resample first")
    a, b = u.with_derivative(), v.with_derivative()
    diff = integrate_radial((a.du - b.du) ** 2 + (a.u - b.u) ** 2, u.N, u.r)
    return math.sqrt(max(diff, 0.0))


def sup_distance(u: RadialProfile, v: RadialProfile) -> float:
    if u.r.shape != v.r.shape or np.max(np.abs(u.r - v.r)) > 1e-12 * u.r_max:
        raise ValueError("profiles live on different grids; resample first")
    return float(np.max(np.abs(u.u - v.u)))


# -- transformations ----------------------------------------------------------

def rescale_profile(u: RadialProfile, sigma: float) -> RadialProfile:
    """v(r) = u(r / sigma), sampled on the dilated grid sigma * r."""
    if not sigma > 0:
        raise ValueError("dilation factor must be positive")
    if sigma == 1.0:
        return u
    du = None if u.du is None else u.du / sigma
    tail = None
    if u.tail is not None:
        tail = ExpTail(u.tail.C * sigma ** ((u.N - 1) / 2.0), u.tail.c / sigma)
    return RadialProfile(u.N, u.r * sigma, u.u, du, tail)


def _evaluate(u: RadialProfile, rho: np.ndarray):
    prof = u.with_derivative()
    d2 = prof.second_derivative()
    poly = BPoly.from_derivatives(prof.r, np.column_stack([prof.u, prof.du, d2]))
    dpoly = poly.derivative()
    inside = rho <= prof.r_max
    vals = np.zeros_like(rho)
    dvals = np.zeros_like(rho)
    vals[inside] = poly(rho[inside])
    dvals[inside] = dpoly(rho[inside])
    if prof.tail is not None and np.any(~inside):
        vals[~inside] = prof.tail(rho[~inside], prof.N)
        dvals[~inside] = prof.tail.derivative(rho[~inside], prof.N)
    return vals, dvals


def resample(u: RadialProfile, grid) -> RadialProfile:
    """Quintic Hermite interpolation (u, u', u'') onto a new grid.

    Points beyond the last node use the tail model, or zero without one.
    """
    grid = np.asarray(grid, dtype=float)
    vals, dvals = _evaluate(u, grid)
    dvals[0] = 0.0
    return RadialProfile(u.N, grid, vals, dvals, u.tail)


def fit_exp_tail(r, u, N: int, lo: float, hi: float) -> Optional[ExpTail]:
    """Least squares fit of log(u r^{(N-1)/2}) = log C - c r where lo <= u <= hi."""
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    sel = (u >= lo) & (u <= hi) & (r > 0)
    if np.count_nonzero(sel) < 3:
        return None
    y = np.log(u[sel]) + 0.5 * (N - 1) * np.log(r[sel])
    slope, intercept = np.polyfit(r[sel], y, 1)
    if not slope < 0:
        return None
    return ExpTail(float(math.exp(intercept)), float(-slope))


# -- CSV ----------------------------------------------------------------------

def profile_to_csv(u: RadialProfile) -> str:
    prof = u.with_derivative()
    buf = io.StringIO()
    buf.write("r,u,dudr\n")
    # repr of a builtin float is the shortest round-tripping form
    for a, b, c in zip(prof.r.tolist(), prof.u.tolist(), prof.du.tolist()):
        buf.write(f"{a!r},{b!r},{c!r}\n")
    if prof.tail is not None:
        buf.write(f"# tail C={float(prof.tail.C)!r} c={float(prof.tail.c)!r}\n")
    return buf.getvalue()


def write_profile_csv(u: RadialProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(profile_to_csv(u))


def read_profile_csv(path, N: int) -> RadialProfile:
    rows, tail = [], None
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "r,u,dudr":
            raise ValueError(f"unexpected header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = dict(item.split("=") for item in line[1:].split()[1:])
                tail = ExpTail(float(parts["C"]), float(parts["c"]))
                continue
            rows.append([float(x) for x in line.split(",")])
    arr = np.asarray(rows)
    return RadialProfile(N, arr[:, 0], arr[:, 1], arr[:, 2], tail)


def profile_from_function(fn: Callable, N: int, grid, dfn: Optional[Callable] = None,
                          tail: Optional[ExpTail] = None) -> RadialProfile:
    """Sample u (and u' when given, otherwise by differences) on a grid."""
    grid = np.asarray(grid, dtype=float)
    u = np.asarray(fn(grid), dtype=float)
    du = np.asarray(dfn(grid), dtype=float) if dfn is not None else radial_derivative(u, grid)
    du = du.copy()
    du[0] = 0.0
    return RadialProfile(N, grid, u, du, tail)

"""Critical-growth nonlinearities f, their primitives F and the truncation f_k.

Every family is evaluated on the positive part of its argument and vanishes
for t <= 0, so all solutions we look for are positive.  Functions accept
scalars or numpy arrays and return the same shape (a Python float for scalar
input).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

FOUR_PI = 4.0 * math.pi


def critical_exponent(N: int) -> float:
    """Sobolev exponent 2* = 2N/(N-2); infinite for N = 2."""
    return math.inf if N <= 2 else 2.0 * N / (N - 2)


@dataclass(frozen=True)
class CriticalSobolev:
    """f(t) = t^((N+2)/(N-2)) + lam * t^(p-1), N >= 3.

    ``large_lambda`` marks the regime p in (2, 4] for N = 3, where existence
    needs lam "large enough" and has no closed-form threshold.
    """

    lam: float = 1.0
    p: float = 5.0
    large_lambda: bool = False

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not self.p > 2:
            raise ValueError("p must exceed 2")


@dataclass(frozen=True)
class CriticalExponential:
    """f(t) = mu t^3 exp(4 pi t^2), N = 2 (Trudinger-Moser critical)."""

    mu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")


@dataclass(frozen=True)
class CustomNonlinearity:
    """User supplied f with optional primitive F and derivative df.

    Missing F is obtained by adaptive quadrature, missing df by central
    differences.  ``lam``/``p`` optionally declare the lower bound
    f(t) >= t^(2*-1) + lam t^(p-1) used by the N >= 3 growth check.
    """

    f: Callable
    F: Optional[Callable] = None
    df: Optional[Callable] = None
    lam: Optional[float] = None
    p: Optional[float] = None
    params: Optional[tuple] = None  # polynomial coefficients, for serialization
    label: str = "custom"


Family = Union[CriticalSobolev, CriticalExponential, CustomNonlinearity]


@dataclass(frozen=True)
class NonlinearitySpec:
    N: int
    family: Family
    truncation: Optional[float] = None
    t_k: float = field(default=math.inf, compare=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.N}")
        if isinstance(self.family, CriticalSobolev) and self.N < 3:
            raise ValueError("critical Sobolev family needs N >= 3")
        if isinstance(self.family, CriticalExponential) and self.N != 2:
            raise ValueError("critical exponential family is two dimensional")
        if self.truncation is not None and not self.truncation > 0:
            raise ValueError("truncation level must be positive")

    @property
    def truncated(self) -> bool:
        return self.truncation is not None


@dataclass
class GrowthReport:
    passes_F1: bool
    passes_F2: bool
    passes_F3: bool
    details: dict
    f3_case: Optional[str] = None
    notes: list = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return self.passes_F1 and self.passes_F2 and self.passes_F3

    def to_dict(self) -> dict:
        return {
            "passes_F1": self.passes_F1,
            "passes_F2": self.passes_F2,
            "passes_F3": self.passes_F3,
            "f3_case": self.f3_case,
            "notes": list(self.notes),
            "details": {k: [list(map(float, row)) for row in v] for k, v in self.details.items()},
        }


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def _call(fn, t):
    try:
        out = np.asarray(fn(t), dtype=float)
        if out.shape == t.shape:
            return out
    except Exception:
        pass
    return np.vectorize(lambda s: float(fn(float(s))), otypes=[float])(t)


def _series_expx(x):
    # e^x (x - 1) + 1 = sum_{j>=2} (j - 1) x^j / j!, used where cancellation bites
    acc = np.zeros_like(x)
    term = x.copy()
    for j in range(2, 30):
        term = term * x / j
        acc += (j - 1) * term
    return acc


def _raw_f(spec, t):
    fam, N = spec.family, spec.N
    tp = np.maximum(t, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(fam, CriticalSobolev):
            q = (N + 2.0) / (N - 2.0)
            out = tp**q + fam.lam * tp ** (fam.p - 1.0)
        elif isinstance(fam, CriticalExponential):
            out = fam.mu * tp**3 * np.exp(FOUR_PI * tp**2)
        else:
            out = _call(fam.f, tp)
    return np.where(t > 0, out, 0.0)


def _raw_F(spec, t):
    fam, N = spec.family, spec.N
    tp = np.maximum(t, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(fam, CriticalSobolev):
            s = critical_exponent(N)
            out = tp**s / s + fam.lam * tp**fam.p / fam.p
        elif isinstance(fam, CriticalExponential):
            x = FOUR_PI * tp**2
            out = np.exp(x) * (x - 1.0) + 1.0
            small = x < 0.1
            if np.any(small):
                out = np.where(small, _series_expx(np.where(small, x, 0.0)), out)
            out = fam.mu * out / (32.0 * math.pi**2)
        elif fam.F is not None:
            out = _call(fam.F, tp)
        else:
            out = np.vectorize(
                lambda s: integrate.quad(lambda y: float(_raw_f(spec, np.asarray(y))), 0.0, s,
                                         epsabs=1e-13, epsrel=1e-12, limit=200)[0],
                otypes=[float])(tp)
    return np.where(t > 0, out, 0.0)


def _raw_df(spec, t):
    fam, N = spec.family, spec.N
    tp = np.maximum(t, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(fam, CriticalSobolev):
            q = (N + 2.0) / (N - 2.0)
            out = q * tp ** (q - 1.0) + fam.lam * (fam.p - 1.0) * tp ** (fam.p - 2.0)
        elif isinstance(fam, CriticalExponential):
            out = fam.mu * (3.0 * tp**2 + 2.0 * FOUR_PI * tp**4) * np.exp(FOUR_PI * tp**2)
        elif fam.df is not None:
            out = _call(fam.df, tp)
        else:
            h = 1e-6 * np.maximum(1.0, tp)
            out = (_call(fam.f, tp + h) - _call(fam.f, np.maximum(tp - h, 0.0))) / (
                tp + h - np.maximum(tp - h, 0.0))
    return np.where(t > 0, out, 0.0)


def eval_f(spec: NonlinearitySpec, t):
    """f(t), clamped at the truncation level when one is set; 0 for t <= 0."""
    ta = np.asarray(t, dtype=float)
    out = _raw_f(spec, ta)
    if spec.truncation is not None:
        out = np.minimum(out, spec.truncation)
    return _out(out, t)


def eval_F(spec: NonlinearitySpec, t):
    """Primitive F(t) = int_0^t f with F(0) = 0.

    For a truncated spec the primitive is continued linearly past the first
    crossing t_k of f = k, which is exact when f stays above k beyond t_k.
    """
    ta = np.asarray(t, dtype=float)
    if spec.truncation is None or not math.isfinite(spec.t_k):
        return _out(_raw_F(spec, ta), t)
    tk, k = spec.t_k, spec.truncation
    Fk = float(_raw_F(spec, np.asarray(tk)))
    below = ta <= tk
    out = np.where(below, _raw_F(spec, np.where(below, ta, 0.0)), Fk + k * (ta - tk))
    return _out(out, t)


def eval_df(spec: NonlinearitySpec, t):
    """f'(t); zero where the truncation is active."""
    ta = np.asarray(t, dtype=float)
    out = _raw_df(spec, ta)
    if spec.truncation is not None:
        out = np.where(_raw_f(spec, ta) >= spec.truncation, 0.0, out)
    return _out(out, t)


def _first_crossing(spec: NonlinearitySpec, k: float, step=1e-3, t_cap=1e6) -> float:
    untr = replace(spec, truncation=None, t_k=math.inf)
    start = 0.0
    chunk = 4096
    while start < t_cap:
        ts = start + step * np.arange(chunk + 1)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = _raw_f(untr, ts)
        hit = np.flatnonzero(~(vals < k))
        if hit.size:
            j = hit[0]
            if j == 0:
                return ts[0]
            lo, hi = ts[j - 1], ts[j]
            while hi - lo > 1e-12:
                mid = 0.5 * (lo + hi)
                if float(_raw_f(untr, np.asarray(mid))) < k:
                    lo = mid
                else:
                    hi = mid
            return hi
        start = ts[-1]
    return math.inf


def truncate(spec: NonlinearitySpec, k: float) -> NonlinearitySpec:
    """Return the spec with f replaced by min{f, k}."""
    if not k > 0:
        raise ValueError("truncation level must be positive")
    level = k if spec.truncation is None else min(k, spec.truncation)
    return replace(spec, truncation=float(level), t_k=_first_crossing(spec, level))


def max_on_interval(spec: NonlinearitySpec, kappa: float, n: int = 100001) -> float:
    """Dense-scan maximum of f on [0, kappa]."""
    ts = np.linspace(0.0, kappa, n)
    return float(np.max(eval_f(spec, ts)))


def polynomial_nonlinearity(coeffs) -> CustomNonlinearity:
    """f(t) = sum_j c_j t^j on t > 0, with exact primitive and derivative."""
    c = np.asarray(coeffs, dtype=float)
    ci, cd = P.polyint(c), P.polyder(c) if c.size > 1 else np.zeros(1)
    return CustomNonlinearity(
        f=lambda t: P.polyval(t, c),
        F=lambda t: P.polyval(t, ci),
        df=lambda t: P.polyval(t, cd),
        params=tuple(float(x) for x in c),
        label="polynomial",
    )


# -- hypothesis checks --------------------------------------------------------

def _approaches(seq, target):
    """Sampled limit test: monotone approach ending within a factor 2 of target."""
    seq = np.asarray(seq, dtype=float)
    if not np.all(np.isfinite(seq)):
        return False
    if target == 0.0:
        mag = np.abs(seq)
        return bool(np.all(np.diff(mag) <= 1e-15 * mag[:-1]) and mag[-1] <= 0.5 * mag[0])
    if target == math.inf:
        return bool(np.all(np.diff(seq) >= 0) and seq[-1] - seq[0] >= math.log(2.0))
    if target == -math.inf:
        return bool(np.all(np.diff(seq) <= 0) and seq[0] - seq[-1] >= math.log(2.0))
    gap = np.abs(seq - target)
    return bool(np.all(np.diff(gap) <= 1e-15 * (1 + gap[:-1])) and 0.5 * target <= seq[-1] <= 2.0 * target)


def _log_f(spec, t):
    fam = spec.family
    if isinstance(fam, CriticalExponential):
        return math.log(fam.mu) + 3.0 * np.log(t) + FOUR_PI * t**2
    with np.errstate(divide="ignore"):
        return np.log(_raw_f(spec, t))


def validate_growth(spec: NonlinearitySpec, m: float) -> GrowthReport:
    """Check (F1)-(F3) on geometric sample sequences.

    F1: f(t)/t on t = 1e-2 ... 1e-6.  F2: f(t)/t^(2*-1) on t = 10 ... 1e4
    (N >= 3) or log[f(t) e^{-a t^2}] for a = 3 pi, 5 pi on t = 1 ... 5 (N = 2).
    F3: the (p, lambda) regime and the pointwise lower bound (N >= 3), or the
    liminf of t f(t) e^{-4 pi t^2} against e m / (2 pi) (N = 2).
    """
    if spec.N < 2:
        raise ValueError("dimension must be >= 2")
    if spec.truncated:
        raise ValueError("growth conditions are stated for the untruncated f")
    N = spec.N
    details, notes = {}, []

    small = 10.0 ** -np.arange(2, 7)
    r1 = np.asarray(_raw_f(spec, small)) / small
    details["F1"] = list(zip(small, r1))
    f1 = _approaches(r1, 0.0)

    f3_case = None
    if N >= 3:
        large = 10.0 ** np.arange(1, 5)
        q = (N + 2.0) / (N - 2.0)
        with np.errstate(over="ignore", invalid="ignore"):
            r2 = np.asarray(_raw_f(spec, large)) / large**q
        details["F2"] = list(zip(large, r2))
        f2 = _approaches(r2, 1.0)

        fam = spec.family
        lam, p = getattr(fam, "lam", None), getattr(fam, "p", None)
        if lam is None or p is None:
            f3 = False
            notes.append("F3: no (lambda, p) lower bound declared")
        else:
            s = critical_exponent(N)
            large_lambda = getattr(fam, "large_lambda", False)
            if N >= 4 and 2 < p < s:
                f3_case = "i"
            elif N == 3 and 4 < p < s:
                f3_case = "ii"
            elif N == 3 and 2 < p <= 4 and large_lambda:
                f3_case = "iii"
                notes.append("F3(iii): lambda declared large; existence deferred to the energy margin")
            ts = np.logspace(-3, 3, 61)
            with np.errstate(over="ignore", invalid="ignore"):
                bound = ts**q + lam * ts ** (p - 1.0)
                gap = np.asarray(_raw_f(spec, ts)) - bound
            details["F3"] = list(zip(ts, gap))
            ok_bound = bool(np.all(gap >= -1e-12 * bound))
            f3 = f3_case is not None and ok_bound
            if f3_case is None:
                notes.append(f"F3: (N={N}, p={p}) outside the admissible regimes")
    else:
        ts = np.arange(1.0, 6.0)
        lf = _log_f(spec, ts)
        hi = lf - 5.0 * math.pi * ts**2
        lo = lf - 3.0 * math.pi * ts**2
        details["F2_above"] = list(zip(ts, hi))
        details["F2_below"] = list(zip(ts, lo))
        f2 = _approaches(hi, -math.inf) and _approaches(lo, math.inf)

        witness = np.log(ts) + lf - FOUR_PI * ts**2  # log of t f(t) e^{-4 pi t^2}
        details["F3"] = list(zip(ts, witness))
        threshold = math.e * m / (2.0 * math.pi)
        exceeds = bool(np.all(np.isfinite(witness)) and np.all(np.diff(witness) >= 0)
                       and witness[-1] > math.log(threshold))
        # an unbounded witness leaves beta0 free; small mu only delays the crossing
        unbounded = _approaches(witness, math.inf)
        f3 = exceeds or unbounded
        if exceeds:
            notes.append(f"F3: beta0 estimate {math.exp(witness[-1]):.6g} > e m/(2 pi) = {threshold:.6g}")
        elif unbounded:
            notes.append(f"F3: liminf witness grows without bound; sampled value {math.exp(witness[-1]):.3g} "
                         f"still below e m/(2 pi) = {threshold:.6g}")

    return GrowthReport(f1, f2, f3, details, f3_case, notes)


# -- serialization ------------------------------------------------------------

def spec_to_dict(spec: NonlinearitySpec) -> dict:
    fam = spec.family
    out = {"N": spec.N}
    if isinstance(fam, CriticalSobolev):
        out.update(family="critical_sobolev", **{"lambda": fam.lam}, p=fam.p)
        if fam.large_lambda:
            out["large_lambda"] = True
    elif isinstance(fam, CriticalExponential):
        out.update(family="critical_exponential", mu=fam.mu)
    elif fam.params is not None:
        out.update(family="polynomial", coeffs=list(fam.params))
    else:
        raise ValueError("custom callables cannot be serialized")
    out["truncation"] = spec.truncation
    return out


_SPEC_KEYS = {
    "critical_sobolev": {"N", "family", "lambda", "p", "large_lambda", "truncation"},
    "critical_exponential": {"N", "family", "mu", "truncation"},
    "polynomial": {"N", "family", "coeffs", "truncation"},
}


def spec_from_dict(d: dict) -> NonlinearitySpec:
    name = d.get("family")
    if name not in _SPEC_KEYS:
        raise ValueError(f"unknown nonlinearity family {name!r}")
    extra = set(d) - _SPEC_KEYS[name]
    if extra:
        raise ValueError(f"unknown keys for {name}: {sorted(extra)}")
    N = d.get("N", 2 if name == "critical_exponential" else 3)
    if name == "critical_sobolev":
        fam = CriticalSobolev(float(d.get("lambda", 1.0)), float(d.get("p", 5.0)),
                              bool(d.get("large_lambda", False)))
    elif name == "critical_exponential":
        fam = CriticalExponential(float(d.get("mu", 1.0)))
    else:
        fam = polynomial_nonlinearity(d["coeffs"])
    spec = NonlinearitySpec(int(N), fam)
    k = d.get("truncation")
    return truncate(spec, float(k)) if k is not None else spec

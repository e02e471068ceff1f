"""Kirchhoff coefficient M, its primitive M^ and the (M1)-(M5) checks."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate


@dataclass(frozen=True)
class Affine:
    """M(t) = a + b t."""

    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.b < 0:
            raise ValueError("b must be nonnegative")


@dataclass(frozen=True)
class Constant:
    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")


@dataclass(frozen=True)
class CustomCoeff:
    """Arbitrary M; the primitive falls back to adaptive quadrature."""

    M: Callable
    Mhat: Optional[Callable] = None
    params: Optional[tuple] = None
    label: str = "custom"


KirchhoffCoeff = Union[Affine, Constant, CustomCoeff]


def _check_t(t):
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise ValueError("M is defined on t >= 0")
    return ta


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


def eval_M(c: KirchhoffCoeff, t):
    ta = _check_t(t)
    if isinstance(c, Affine):
        out = c.a + c.b * ta
    elif isinstance(c, Constant):
        out = np.full_like(ta, c.a)
    else:
        out = np.vectorize(lambda s: float(c.M(s)), otypes=[float])(ta)
    return _out(out, t)


@functools.lru_cache(maxsize=4096)
def _quad_mhat(c: CustomCoeff, t: float) -> float:
    return integrate.quad(lambda s: float(c.M(s)), 0.0, t, epsabs=1e-10, epsrel=1e-12, limit=200)[0]


def eval_Mhat(c: KirchhoffCoeff, t):
    """M^(t) = int_0^t M(s) ds."""
    ta = _check_t(t)
    if isinstance(c, Affine):
        out = c.a * ta + 0.5 * c.b * ta**2
    elif isinstance(c, Constant):
        out = c.a * ta
    elif c.Mhat is not None:
        out = np.vectorize(lambda s: float(c.Mhat(s)), otypes=[float])(ta)
    else:
        out = np.vectorize(lambda s: _quad_mhat(c, float(s)), otypes=[float])(ta)
    return _out(out, t)


def inf_M(c: KirchhoffCoeff) -> float:
    """m0 = inf M over t >= 0 (sampled for custom coefficients)."""
    if isinstance(c, (Affine, Constant)):
        return float(c.a)
    ts = np.concatenate([[0.0], np.logspace(-4, 6, 401)])
    return float(np.min(eval_M(c, ts)))


@dataclass
class CoeffReport:
    passes: dict
    evidence: dict = field(default_factory=dict)
    m0: float = math.nan

    @property
    def ok(self) -> bool:
        return all(self.passes.values())

    def failed(self) -> list:
        return [k for k, v in self.passes.items() if not v]

    def to_dict(self) -> dict:
        return {
            "passes": dict(self.passes),
            "m0": self.m0,
            "evidence": {k: [list(map(float, row)) for row in v] for k, v in self.evidence.items()},
        }


def validate_M(c: KirchhoffCoeff, N: int, n_samples: int = 101) -> CoeffReport:
    """Sampled (M1)-(M5) on the geometric grid t in [1e-4, 1e6].

    Only (M1) is required for N = 2.  Trends are judged on the upper half
    of the grid for the limits (M2), (M3); (M4), (M5) are pairwise
    monotonicity over the whole grid.
    """
    if N < 2:
        raise ValueError("dimension must be >= 2")
    ts = np.logspace(-4, 6, n_samples)
    Ms = eval_M(c, ts)
    m0 = float(np.min(Ms))
    passes = {"M1": bool(np.all(np.isfinite(Ms)) and m0 > 0)}
    evidence = {"M1": list(zip(ts, Ms))}
    if N == 2:
        return CoeffReport(passes, evidence, m0)

    upper = slice(n_samples // 2, None)
    g = eval_Mhat(c, ts) - (1.0 - 2.0 / N) * ts * Ms
    gu = g[upper]
    passes["M2"] = bool(np.all(np.diff(gu) > 0) and gu[-1] > 0 and gu[-1] > 100.0 * abs(gu[0]))
    evidence["M2"] = list(zip(ts, g))

    ratio = Ms / ts ** (2.0 / (N - 2))
    ru = ratio[upper]
    passes["M3"] = bool(np.all(np.diff(ru) <= 0) and ru[-1] <= 0.5 * ru[0] and ru[-1] < 1e-2 * np.max(ratio))
    evidence["M3"] = list(zip(ts, ratio))

    dM = np.diff(Ms)
    passes["M4"] = bool(np.all(dM >= -1e-12 * np.abs(Ms[:-1])))
    evidence["M4"] = list(zip(ts[1:], dM))

    dr = np.diff(ratio)
    passes["M5"] = bool(np.all(dr <= 1e-12 * np.abs(ratio[:-1])))
    evidence["M5"] = list(zip(ts[1:], dr))
    return CoeffReport(passes, evidence, m0)


def polynomial_coeff(coeffs) -> CustomCoeff:
    """M(t) = sum_j c_j t^j with its exact primitive."""
    c = np.asarray(coeffs, dtype=float)
    ci = P.polyint(c)
    return CustomCoeff(M=lambda t: P.polyval(t, c), Mhat=lambda t: P.polyval(t, ci),
                       params=tuple(float(x) for x in c), label="polynomial")


def coeff_to_dict(c: KirchhoffCoeff) -> dict:
    if isinstance(c, Affine):
        return {"family": "affine", "a": c.a, "b": c.b}
    if isinstance(c, Constant):
        return {"family": "constant", "a": c.a}
    if c.params is not None:
        return {"family": "polynomial", "coeffs": list(c.params)}
    raise ValueError("custom callables cannot be serialized")


_KEYS = {"affine": {"family", "a", "b"}, "constant": {"family", "a"}, "polynomial": {"family", "coeffs"}}


def coeff_from_dict(d: dict) -> KirchhoffCoeff:
    name = d.get("family")
    if name not in _KEYS:
        raise ValueError(f"unknown coefficient family {name!r}")
    extra = set(d) - _KEYS[name]
    if extra:
        raise ValueError(f"unknown keys for {name}: {sorted(extra)}")
    if name == "affine":
        return Affine(float(d.get("a", 1.0)), float(d.get("b", 0.0)))
    if name == "constant":
        return Constant(float(d.get("a", 1.0)))
    return polynomial_coeff(d["coeffs"])

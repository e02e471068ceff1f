"""JSON run configuration shared by the command line tools."""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Optional

from .coefficient import KirchhoffCoeff, coeff_from_dict, coeff_to_dict
from .groundstate import LocalProblem, ShootingOptions
from .nonlinearity import NonlinearitySpec, spec_from_dict, spec_to_dict
from .semiclassical import PotentialSpec, potential_from_dict


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "problem": {
        "spec": {"N": 3, "family": "critical_sobolev", "lambda": 1.0, "p": 5.0, "truncation": None},
        "m": 1.0,
        "coeff": {"family": "affine", "a": 1.0, "b": 0.5},
        "pot": {"family": "rational", "m": 1.0, "depth": 1.0, "O_radius": 1.0},
    },
    "numerics": {
        "grid": {"h": 1e-3, "r_uniform": 10.0, "r_max": 60.0, "growth": 1.001},
        "tolerances": {"rtol": 1e-10, "atol": 1e-12, "bracket_rtol": 1e-12, "newton_tol": 1e-10},
        "s_max": None,
        "method": "DOP853",
    },
    "moser": {"n_max": 2**20, "beta0": None, "r": None},
    "semiclassical": {"eps": [0.5, 0.2, 0.1, 0.05], "damping": 0.5, "max_outer": 200},
}

DEFAULT_2D = {
    "spec": {"N": 2, "family": "critical_exponential", "mu": 1.0, "truncation": None},
    "m": 1.0,
    "coeff": {"family": "affine", "a": 1.0, "b": 0.5},
    "pot": {"family": "rational", "m": 1.0, "depth": 1.0, "O_radius": 1.0},
}


def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in base:
            raise ConfigError(f"unknown key {path + key!r}")
        if isinstance(base[key], dict) and isinstance(val, dict) and key not in ("spec", "coeff"):
            out[key] = _merge(base[key], val, path + key + ".")
        else:
            out[key] = val
    return out


@dataclass(frozen=True)
class RunConfig:
    raw: dict
    problem: LocalProblem
    coeff: KirchhoffCoeff
    pot: Optional[PotentialSpec]
    shooting: ShootingOptions
    grid: dict
    newton_tol: float
    moser: dict
    semiclassical: dict

    @property
    def N(self) -> int:
        return self.problem.N

    def resolved(self) -> dict:
        """The full configuration after defaults, as written into every summary."""
        return copy.deepcopy(self.raw)


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    base = copy.deepcopy(DEFAULTS)
    spec_doc = doc.get("problem", {}).get("spec") if isinstance(doc.get("problem"), dict) else None
    if isinstance(spec_doc, dict) and spec_doc.get("N") == 2:
        base["problem"] = copy.deepcopy(DEFAULT_2D)
    raw = _merge(base, doc)
    p = raw["problem"]
    try:
        spec: NonlinearitySpec = spec_from_dict(p["spec"])
        coeff = coeff_from_dict(p["coeff"])
        pot = potential_from_dict(p["pot"]) if p["pot"] is not None else None
        prob = LocalProblem(spec, float(p["m"]))
        num = raw["numerics"]
        tol = num["tolerances"]
        shooting = ShootingOptions(rtol=float(tol["rtol"]), atol=float(tol["atol"]),
                                   bracket_rtol=float(tol["bracket_rtol"]), method=str(num["method"]),
                                   s_max=None if num["s_max"] is None else float(num["s_max"]),
                                   r_max=float(num["grid"]["r_max"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if pot is not None and abs(pot.m - prob.m) > 1e-12 * prob.m:
        raise ConfigError("potential minimum must equal problem.m")
    eps = raw["semiclassical"]["eps"]
    if not isinstance(eps, list) or any(not isinstance(e, (int, float)) or e < 0 for e in eps):
        raise ConfigError("semiclassical.eps must be a list of nonnegative numbers")
    return RunConfig(raw, prob, coeff, pot, shooting, dict(raw["numerics"]["grid"]),
                     float(raw["numerics"]["tolerances"]["newton_tol"]), dict(raw["moser"]),
                     dict(raw["semiclassical"]))


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return parse_config({})
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(doc)


def problem_to_dict(cfg: RunConfig) -> dict:
    return {"spec": spec_to_dict(cfg.problem.spec), "m": cfg.problem.m, "coeff": coeff_to_dict(cfg.coeff)}


def moser_beta0(cfg: RunConfig) -> float:
    b = cfg.moser.get("beta0")
    return math.inf if b is None else float(b)

"""Regenerate tests/data/oracles.json.

Closed forms are written exactly; solver outputs are frozen regression
values.  Rerun only after an intentional numerical change and review the diff.
"""
import json
import math
import pathlib

from kirchhoff_gs import (Affine, CriticalExponential, CriticalSobolev, LocalProblem, NonlinearitySpec,
                          find_ground_state, lift)
from kirchhoff_gs.functionals import minimization_level
from kirchhoff_gs.moser2d import criticality_table

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"


def gs_record(prob):
    gs = find_ground_state(prob)
    lr = lift(gs, Affine(1.0, 0.5))
    return {"shoot_height": gs.shoot_height, "energy": gs.energy, "grad_sq": gs.norms.grad_sq,
            "mass_sq": gs.norms.mass_sq, "A_level": minimization_level(gs), "t_u": lr.t_u,
            "grad_sq_lifted": lr.grad_sq_v}


def main():
    p3 = LocalProblem(NonlinearitySpec(3, CriticalSobolev(1.0, 5.0)), 1.0)
    p2 = LocalProblem(NonlinearitySpec(2, CriticalExponential(1.0)), 1.0)
    rows = criticality_table(NonlinearitySpec(2, CriticalExponential(1.0)), 1.0, 2**20)
    data = {
        "closed_form": {
            "sobolev_S3": 3.0 * (math.pi / 2.0) ** (4.0 / 3.0),
            "t_u_affine_1_half_c4_N3": 1.0 + math.sqrt(2.0),
        },
        "regression": {
            "N3_lambda1_p5_m1": gs_record(p3),
            "N2_mu1_m1": gs_record(p2),
            "moser_mu1_m1": [list(r.as_tuple()) for r in rows],
        },
    }
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(OUT)


if __name__ == "__main__":
    main()

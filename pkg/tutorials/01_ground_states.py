"""Ground states of -u'' - (N-1)/r u' + m u = f(u) by shooting, checked by FD-Newton.

Run: python3 tutorials/01_ground_states.py
"""
import numpy as np

from kirchhoff_gs import (CriticalExponential, CriticalSobolev, LocalProblem, NonlinearitySpec, fd_ground_state,
                          find_ground_state, uniform_grid)
from kirchhoff_gs.functionals import energy_report
from kirchhoff_gs.radial import resample

problems = {
    "N=3, f = t^5 + t^4": LocalProblem(NonlinearitySpec(3, CriticalSobolev(1.0, 5.0)), 1.0),
    "N=2, f = t^3 exp(4 pi t^2)": LocalProblem(NonlinearitySpec(2, CriticalExponential(1.0)), 1.0),
}

for label, prob in problems.items():
    gs = find_ground_state(prob)
    rep = energy_report(gs)
    print(label)
    print(f"  u(0) = {gs.shoot_height:.10f}   energy = {gs.energy:.10f}")
    print(f"  grad_sq = {gs.norms.grad_sq:.10f}   mass_sq = {gs.norms.mass_sq:.10f}")
    print(f"  Pohozaev residual = {gs.pohozaev_residual:.2e}")
    print(f"  existence margin = {rep.existence_margin:.6f} (negative: below the compactness threshold)")

    # independent check: Newton on a 9-point finite difference discretization
    ref = resample(gs.profile, uniform_grid())
    fd = fd_ground_state(prob, ref)
    print(f"  |shooting - FD-Newton|_inf = {np.max(np.abs(fd.profile.u - ref.u)):.2e}")

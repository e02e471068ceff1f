"""From a local ground state to a Kirchhoff ground state by a dilation.

For M(t) = a + b t^(1/2) and N = 3, v(x) = u(x / t_u) with t_u^2 = M(t_u ||grad u||^2)
solves -M(||grad v||^2) Lap v + m v = f(v).

Run: python3 tutorials/02_kirchhoff_lift.py
"""
import numpy as np

from kirchhoff_gs import (Affine, CriticalSobolev, LocalProblem, NonlinearitySpec, find_ground_state, lift, project,
                          solve_t_u, validate_M)

c = Affine(1.0, 0.5)
print("coefficient hypotheses:", validate_M(c, 3).passes)

gs = find_ground_state(LocalProblem(NonlinearitySpec(3, CriticalSobolev(1.0, 5.0)), 1.0))
lr = lift(gs, c)
print(f"t_u = {lr.t_u:.12f}")
print(f"grad_sq(u) = {gs.norms.grad_sq:.8f} -> grad_sq(v) = {lr.grad_sq_v:.8f}")
print(f"Kirchhoff residual of v = {lr.kirchhoff_residual:.2e}")
print(f"energy identity residual = {lr.energy_identity_residual:.2e}")

back = project(lr.v, gs.problem, c)
print(f"|project(lift(u)) - u|_inf = {np.max(np.abs(back.u - gs.profile.u)):.2e}")

# the scalar equation has a closed form when grad_sq = 4: t^2 = 1 + t, t = 1 + sqrt(2)
print(f"t_u(grad_sq = 4) = {solve_t_u(c, 4.0, 3)!r}, 1 + sqrt(2) = {1 + 2**0.5!r}")

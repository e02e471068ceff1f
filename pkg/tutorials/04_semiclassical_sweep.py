"""Concentration of Kirchhoff spikes in a potential well as eps -> 0.

Solves -M(||grad w||^2) Lap w + V(eps rho) w = f_k(w) in the rescaled variable
and watches w approach the ground state of the limit problem.

Run: python3 tutorials/04_semiclassical_sweep.py   (about 15 s)
"""
from kirchhoff_gs import (Affine, CriticalSobolev, LocalProblem, NonlinearitySpec, continuation_sweep,
                          find_ground_state, limit_state, rational_well)
from kirchhoff_gs.semiclassical import coefficient_bounds

c = Affine(1.0, 0.5)
well = rational_well(1.0, 1.0, 1.0)  # V(rho) = 1 + rho^2 / (1 + rho^2)
gs = find_ground_state(LocalProblem(NonlinearitySpec(3, CriticalSobolev(1.0, 5.0)), 1.0))
lim = limit_state(gs, c)
print(f"kappa = {lim.kappa:.6f}   k = {lim.k:.3f}   theta(limit) = {lim.theta:.6f}")

sweep = continuation_sweep(well, lim.spec, c, [0.5, 0.2, 0.1, 0.05], lim)
print(f"{'eps':>5} {'h1 dist':>10} {'sup dist':>10} {'spike':>10} {'M(theta)':>10} {'decay c':>9} {'far field':>9}")
for r in sweep:
    print(f"{r.eps:>5} {r.h1_dist_to_limit:>10.5f} {r.sup_dist_to_limit:>10.5f} {r.spike_height:>10.5f} "
          f"{r.coefficient:>10.5f} {r.decay_c:>9.5f} {r.reference_rate:>9.5f}")
print("coefficient bounds:", coefficient_bounds(sweep, c, lim))

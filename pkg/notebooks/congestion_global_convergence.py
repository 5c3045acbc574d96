"""
Congestion game: global convergence under a passive cascade
===========================================================

The congestion game is strictly contractive, so any passive filter
g(s) driving the softmax yields global convergence. With an integrator
inside g the rest points are exactly the Nash equilibria.
"""

import numpy as np

from hordyn import (ClosedLoopSystem, LearningRule, TransferFunction, congestion_example,
                    contractiveness, incremental_probe, integrate, interior_nash,
                    theorem3_certificate)

game = congestion_example()
x_star, alpha = interior_nash(game)
print("Nash equilibrium:", np.round(x_star, 6), " common payoff:", round(alpha, 6))
print("tangent eigenvalue max:", round(contractiveness(game).max_tangent_eig, 6))

g = TransferFunction([2, 3.5, 2], [1, 3, 2, 0])
cert = theorem3_certificate(game, g)
print("certificate verdict:", cert.verdict)

sys = ClosedLoopSystem(LearningRule.cascade(g), game)
rng = np.random.default_rng(1)
for k in range(3):
    tr = integrate(sys, rng.normal(size=sys.size), 500)
    print(f"run {k}: |x(500) - x*| = {np.linalg.norm(tr.x[-1] - x_star):.2e}")

# two trajectories pulled toward each other
probe = incremental_probe(sys, rng.normal(size=sys.size), rng.normal(size=sys.size), 500)
print(f"pair distance {probe.initial_distance:.3f} -> {probe.final_distance:.2e}")

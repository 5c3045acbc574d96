"""
Exponentially discounted RD: fast, but not Nash
===============================================

With g(s) = 1/(s+1) the score is a low-pass filtered payoff.
Trajectories contract exponentially, yet the limit solves z = F softmax(z)
instead of the Nash conditions.
"""

import numpy as np

from hordyn import (ClosedLoopSystem, LearningRule, TransferFunction, congestion_example,
                    fixed_point_exrd, incremental_probe, integrate, interior_nash, nash_gap)

game = congestion_example()
g = TransferFunction([1], [1, 1])
sys = ClosedLoopSystem(LearningRule.cascade(g), game)

fp = fixed_point_exrd(game)
tr = integrate(sys, np.zeros(3), 100)
print("fixed point   :", np.round(fp.x, 6))
print("simulated x(T):", np.round(tr.x[-1], 6))
print("Nash point    :", np.round(interior_nash(game)[0], 6))
print(f"Nash gap at the limit: {nash_gap(game, tr.x[-1]):.4f}")

rng = np.random.default_rng(2)
rep = incremental_probe(sys, rng.normal(size=3), rng.normal(size=3), 40)
print(f"log-distance slope {rep.fitted_rate:.3f} (R^2 = {rep.fit_r2:.6f})")

"""
Rock-paper-scissors: cycling versus convergence
===============================================

Standard replicator dynamics orbit the mixed equilibrium forever.
Adding a strictly passive filter in parallel with the score integrator
turns the orbit into a spiral that lands on (1/3, 1/3, 1/3).
"""

import numpy as np

from hordyn import (ClosedLoopSystem, LearningRule, TransferFunction, integrate,
                    linearize_higher_order, rps_example)

game = rps_example()
x0 = np.array([0.5, 0.3, 0.2])
x_star = np.ones(3) / 3

# plain RD: the relative entropy to x* is a conserved quantity
rd = ClosedLoopSystem(LearningRule.standard_rd(), game)
tr = integrate(rd, rd.initial_state(x0), 100, rtol=1e-10, atol=1e-10)
kl = np.array([np.sum(x_star * np.log(x_star / x)) for x in tr.x])
print(f"standard RD   D(x*||x) spread over [0,100]: {np.ptp(kl):.2e}")
print(f"standard RD   |x(100) - x*| = {np.linalg.norm(tr.x[-1] - x_star):.4f}")

# higher-order RD with h(s) = (2s+3)/(s^2+3s+2)
h = TransferFunction([2, 3], [1, 3, 2])
hord = ClosedLoopSystem(LearningRule.higher_order_rd(h), game)
tr = integrate(hord, hord.initial_state(x0), 200)
print(f"higher-order  |x(200) - x*| = {np.linalg.norm(tr.x[-1] - x_star):.2e}")

# the linearization explains it: RD sits on the imaginary axis, the filter pushes left
for label, filt in (("standard RD", None), ("higher-order", h)):
    rep = linearize_higher_order(game, filt)
    print(f"{label:13s} max Re(eig) = {rep.max_real_part:+.4f}")

# Finite, periodized systems: the cycle operator and two noise bounds.
import warnings

import numpy as np

from kaczlab import RankWarning, cycle_operator_norm, frame_bound_check, make_atomic, periodize, truncated_noisy_run

mu = make_atomic([(0.0, 0.1), (0.11, 0.15), (0.27, 0.1), (0.4, 0.1), (0.52, 0.2), (0.66, 0.1),
                  (0.79, 0.15), (0.93, 0.1)])
rng = np.random.default_rng(2)
x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
x /= np.sqrt(np.sum(mu.weights * np.abs(x) ** 2))

print(" N   |T|     gap      limsup   classical   frame lhs  frame rhs")
for N in (2, 4, 6, 8, 12):
    sys = periodize(mu, N)
    eps = 0.01 * (rng.standard_normal(N) + 1j * rng.standard_normal(N))
    rep = truncated_noisy_run(sys, x, eps)
    b = rep.bound_values
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        lhs, rhs = frame_bound_check(sys, x, eps)
    print(f"{N:2d}  {cycle_operator_norm(sys):.3f}  {b['projection_gap']:.2e}  {b['limsup']:.2e}  "
          f"{b['classical']:.2e}   {lhs:.2e}   {rhs:.2e}")

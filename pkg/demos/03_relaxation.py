# Relaxed Kaczmarz: augmented iteration, small omega and least squares.
import numpy as np

from kaczlab import (InputStream, abel_partial, alpha_coefficients, analysis, augmented_run, augmented_vs_relaxed,
                     make_atomic, moore_penrose_lss, norm, periodize, phi_matrix, relaxed_limit)

mu = make_atomic([(0.0, 0.5), (1 / 3, 0.25), (2 / 3, 0.25)])
rng = np.random.default_rng(1)
c = rng.standard_normal(21) + 1j * rng.standard_normal(21)

# the augmented iteration reproduces the Abel partial sum exactly
y = augmented_run(mu, InputStream.raw(c), 0.8, 20)
print("augmented vs Abel:", norm(mu, y - abel_partial(mu, alpha_coefficients(mu, 20), c, 0.8, 20)))

# it equals relaxed Kaczmarz with omega_n = r**n only for orthogonal vectors
two = make_atomic([(0.0, 0.5), (0.5, 0.5)])
print("orthogonal pair:  ", augmented_vs_relaxed(two, phi_matrix(two, 1), c, 0.8, 20))
print("three atoms:      ", augmented_vs_relaxed(mu, None, c, 0.8, 20))

# an inconsistent periodic system: omega -> 0 gives the least-squares solution
sys = periodize(mu, 7)
data = analysis(sys, rng.standard_normal(3)) + 0.3 * rng.standard_normal(7)
z = moore_penrose_lss(sys, data)
print("relaxed limit vs least squares:", norm(mu, relaxed_limit(mu, sys.vectors, data) - z))

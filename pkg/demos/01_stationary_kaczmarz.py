# Kaczmarz on a stationary sequence phi_n = exp(2 pi i n x_k) in L2(mu), mu atomic.
import numpy as np

from kaczlab import InputStream, alpha_coefficients, kaczmarz_run, make_atomic, moments, series_reconstruction

mu = make_atomic([(0.0, 0.5), (1 / 3, 0.25), (2 / 3, 0.25)])
print("moments:", np.round(moments(mu, 6), 4))

# alpha solves alpha * mu_hat = delta; it is the coefficient sequence of 1 - b
alpha = alpha_coefficients(mu, 6)
print("alpha:  ", np.round(alpha.coeffs, 4))

rng = np.random.default_rng(0)
x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
c = InputStream.clean(mu, x)
rep = kaczmarz_run(mu, c, 200, truth=x)
for n in (0, 5, 20, 50, 200):
    print(f"step {n:4d}  error {rep.error_norms[n]:.3e}")

# the iterate is the partial series sum_n (alpha * c)_n phi_n
x_series = series_reconstruction(mu, alpha_coefficients(mu, 200), c, 200)
print("iterate minus series:", np.max(np.abs(rep.final - x_series)))

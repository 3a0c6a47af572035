# Noisy data: plain Kaczmarz versus Abel damping of the same series.
import numpy as np

from kaczlab import InputStream, NoiseProfile, abel_sweep, kaczmarz_run, make_atomic

mu = make_atomic([(0.0, 0.5), (0.5, 0.5)])
x = np.array([1.0, -0.5j])
clean = InputStream.clean(mu, x)

# summable noise dies out on its own: the error tracks the last few noise values
p = NoiseProfile.geometric(1.0, 0.5)
rep = kaczmarz_run(mu, InputStream.noisy(mu, x, p), 60, truth=x)
print("geometric noise, error at steps 10, 30, 60:", rep.error_norms[[10, 30, 60]])

# a bounded oscillation away from the atoms never dies out
n_max = 10**6
eps = 0.1 * np.exp(2j * np.pi * 0.2 * np.arange(n_max + 1))
noisy = InputStream.raw(clean.values(n_max) + eps)
rep = kaczmarz_run(mu, noisy, 2000, truth=x)
print("oscillating noise, plain error over the last steps:", np.round(rep.error_norms[-4:], 4))

# Abel damping of the same data converges, at rate (1 - r)
res = abel_sweep(mu, noisy, [0.9, 0.99, 0.999], 1e-12, x)
for r, n, e in zip(res.r_values, res.depths, res.errors):
    print(f"r = {r:<6} depth {n:6d}  error {e:.5f}")

# with zero truth and geometric noise the error has a closed form at the atoms
zero = np.zeros(2)
res = abel_sweep(mu, InputStream.noisy(mu, zero, p), [0.9, 0.99], 1e-12, zero)
print("geometric noise, Abel errors:", np.round(res.errors, 4))

# the moment sequence itself as noise defeats any damping: the error stays at 1
adv = InputStream.noisy(mu, zero, NoiseProfile.moment_adversary(mu))
print("adversarial noise:", abel_sweep(mu, adv, [0.9, 0.99, 0.999], 1e-12, zero).errors)

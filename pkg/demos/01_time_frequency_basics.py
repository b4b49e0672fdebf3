"""Time-frequency shifts, the STFT and the unitary DFT on Z_L.

Walks through the exact algebra of the finite model: the commutation scalar
of shifts, the covariance of the STFT, the Moyal energy identity, and how
the DFT rotates the time-frequency plane by -J.
"""

import numpy as np

import gaborfio as gf

cfg = gf.ModelConfig(L=16)
rng = np.random.Generator(np.random.Philox(1))
f = gf.random_signal(cfg, rng)
g = gf.periodized_gaussian(cfg)

print("== time-frequency shifts ==")
print("pi(k, m) f[n] = exp(2 pi i m n / L) f[n - k];  unitary:",
      np.isclose(gf.tf_shift(f, 3, 5).norm, f.norm))

# shifts commute only up to a phase: pi(k,m) pi(k',m') = c pi(k+k', m+m')
a = gf.tf_shift(gf.tf_shift(f, 1, 0), 2, 3)
b = gf.tf_shift(f, 3, 3)
scalar = a.values[np.argmax(abs(b.values))] / b.values[np.argmax(abs(b.values))]
print(f"composition scalar pi(2,3)pi(1,0) vs pi(3,3): {scalar:.4f} "
      f"(|scalar| = {abs(scalar):.4f})")

print("\n== STFT ==")
V = gf.stft(f, g)
print("V_g f[0, 0] = <f, g> =", np.isclose(V.values[0, 0], np.vdot(g.values, f.values)))
energy = np.sum(np.abs(V.values) ** 2)
print(f"Moyal: sum |V|^2 = {energy:.6f}  vs  L ||f||^2 ||g||^2 = "
      f"{cfg.L * f.norm**2 * g.norm**2:.6f}")

# covariance: shifting the signal translates the STFT (up to phase)
y, xi = 4, 7
Vs = gf.stft(gf.tf_shift(f, y, xi), g)
moved = np.roll(np.abs(V.values), (y, xi), axis=(0, 1))
print("covariance |V_g(pi(y,xi) f)| = |V_g f| shifted:",
      np.allclose(np.abs(Vs.values), moved))

print("\n== unitary DFT ==")
F = gf.dft_matrix(cfg.L)
print("F^4 = I:", np.allclose(np.linalg.matrix_power(F, 4), np.eye(cfg.L)))
print("Gaussian window is a fixed vector of F:",
      np.allclose(gf.dft_unitary(g).values, g.values))

# F conjugates pi(k, m) to pi(m, -k): the -J rotation of the TF plane
k, m = 2, 5
lhs = gf.dft_unitary(gf.tf_shift(f, k, m)).values
rhs = gf.tf_shift(gf.dft_unitary(f), m, -k).values
phase = np.exp(2j * np.pi * k * m / cfg.L)
print("F pi(k,m) = e^{2 pi i km/L} pi(m,-k) F:", np.allclose(lhs, phase * rhs))

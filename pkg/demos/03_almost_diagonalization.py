"""Almost-diagonalization of pseudodifferential operators by Gabor frames.

The Gabor matrix K[mu, lam] = <T pi(lam) w, pi(mu) w> of a smooth-symbol
operator concentrates on the diagonal mu = lam; fitting the envelope of |K|
against <mu - lam> measures the decay exponent.  Profiling against a wrong
canonical transformation destroys the decay, which is the whole point: the
graph is detectable from the matrix.
"""

import numpy as np

import gaborfio as gf

cfg = gf.ModelConfig(L=64)
frame = gf.build_frame(gf.periodized_gaussian(cfg), gf.Lattice(4, 4, cfg))
rng = np.random.Generator(np.random.Philox(3))

ops = {
    "identity": gf.identity_operator(cfg),
    "smooth-symbol KN": gf.kn_quantize(gf.random_smooth_symbol(cfg, rng)),
    "rough-symbol KN": gf.kn_quantize(gf.SymbolGrid(
        rng.normal(size=(64, 64)) + 1j * rng.normal(size=(64, 64)), cfg)),
}

mJ = np.array([[0.0, 1.0], [-1.0, 0.0]])
for name, T in ops.items():
    K = gf.gabor_matrix(T, frame)
    right = gf.decay_profile(K, np.eye(2))
    wrong = gf.decay_profile(K, mJ)
    print(f"{name:18s} s_fit(identity graph) = {right.s_fit:6.2f}   "
          f"s_fit(-J graph) = {wrong.s_fit:6.2f}")

print("\nenvelope of the identity operator's Gabor matrix:")
K = gf.gabor_matrix(ops["identity"], frame)
prof = gf.decay_profile(K, np.eye(2))
peak = max(e for _, e, _ in prof.bins)
for d, e, cnt in prof.bins:
    bar = "#" * max(int(60 + 2 * np.log10(e / peak + 1e-300)), 0)
    print(f"  <d> ~ {d:7.2f}  envelope {e/peak:9.2e}  {bar}")
print(f"fitted exponent s = {prof.s_fit:.2f} (r^2 = {prof.r2:.2f});")
print("the plateau around <d> ~ 20-40 is the tight-window satellite floor")
print("at the adjoint-lattice scale, a finite-density artifact of S^(-1/2).")

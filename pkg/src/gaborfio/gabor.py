"""Gabor frames on separable lattices: frame operator, tight window, analysis,
synthesis, and modulation-space norms of coefficient arrays.

The lattice is a Z x b Z inside Z_L x Z_L with a | L and b | L; lattice points
are enumerated time-major: index i = j * (L//b) + k  <->  lambda = (j*a, k*b).
All frames are reduced to Parseval form through the canonical tight window
w = S^{-1/2} g, so synthesis * analysis is exactly the identity and no dual
window is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameDeficient, ModelError, WindowError
from .tfcore import ModelConfig, Signal, tf_shift, wrap_half

__all__ = [
    "Lattice", "GaborFrame", "CoefficientArray", "WeightSpec",
    "build_frame", "analysis", "synthesis", "modulation_norm",
    "atom_matrix", "default_lattice",
]


@dataclass(frozen=True)
class Lattice:
    """Separable lattice aZ x bZ in Z_L^2."""

    a: int
    b: int
    config: ModelConfig

    def __post_init__(self):
        L = self.config.L
        if self.a <= 0 or self.b <= 0 or L % self.a or L % self.b:
            raise ModelError(f"lattice steps must divide L={L}, got a={self.a} b={self.b}")

    @property
    def n_time(self) -> int:
        return self.config.L // self.a

    @property
    def n_freq(self) -> int:
        return self.config.L // self.b

    @property
    def size(self) -> int:
        return self.n_time * self.n_freq

    @property
    def density(self) -> float:
        """Redundancy L/(ab); a frame requires density >= 1."""
        return self.config.L / (self.a * self.b)

    def points(self) -> np.ndarray:
        """(size, 2) array of lattice points (j*a, k*b), time-major order."""
        j, k = np.meshgrid(np.arange(self.n_time), np.arange(self.n_freq), indexing="ij")
        return np.stack([j.ravel() * self.a, k.ravel() * self.b], axis=1)


def default_lattice(config: ModelConfig, density: float = 4.0) -> Lattice:
    """Most nearly square lattice with ab = L/density (exact divisors required)."""
    ab = config.L / density
    if ab != int(ab):
        raise ModelError(f"L/density = {ab} is not an integer")
    ab = int(ab)
    best = None
    for a in range(1, ab + 1):
        if ab % a or config.L % a or config.L % (ab // a):
            continue
        b = ab // a
        score = abs(np.log(a / b))
        # ties (a, b) vs (b, a) resolve to the time-coarser representative
        if best is None or score < best[0] - 1e-12 or (
                abs(score - best[0]) < 1e-12 and a > best[1]):
            best = (score, a, b)
    if best is None:
        raise ModelError(f"no divisor pair with ab = {ab} for L = {config.L}")
    return Lattice(best[1], best[2], config)


@dataclass(frozen=True)
class CoefficientArray:
    """Gabor coefficients indexed (time index j, frequency index k)."""

    values: np.ndarray
    lattice: Lattice

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        shape = (self.lattice.n_time, self.lattice.n_freq)
        if v.shape != shape:
            raise ModelError(f"coefficient shape {v.shape} != {shape}")
        object.__setattr__(self, "values", v)

    def ravel(self) -> np.ndarray:
        """Flatten in the canonical time-major order."""
        return self.values.ravel()

    @classmethod
    def from_flat(cls, flat: np.ndarray, lattice: Lattice) -> "CoefficientArray":
        return cls(np.asarray(flat).reshape(lattice.n_time, lattice.n_freq), lattice)


@dataclass(frozen=True)
class WeightSpec:
    """Polynomial weight v_s(z) = (1 + |z|^2)^(s/2), or an explicit table.

    v_s is moderate rather than plainly submultiplicative: the sharp bound is
    Peetre's inequality v_s(z + w) <= 2^(s/2) v_s(z) v_s(w).
    """

    s: float = 0.0
    table: np.ndarray | None = None

    def value(self, points: np.ndarray, L: int) -> np.ndarray:
        """Evaluate the weight at (N, 2) points, wrapped to [-L/2, L/2)."""
        d = wrap_half(np.asarray(points, dtype=float), L)
        return (1.0 + (d ** 2).sum(axis=-1)) ** (self.s / 2)

    def on_lattice(self, lattice: Lattice) -> np.ndarray:
        if self.table is not None:
            t = np.asarray(self.table, dtype=float)
            if t.shape != (lattice.n_time, lattice.n_freq):
                raise ModelError("weight table shape does not match lattice")
            return t
        vals = self.value(lattice.points(), lattice.config.L)
        return vals.reshape(lattice.n_time, lattice.n_freq)

    def peetre_defect(self, rng: np.random.Generator, n_samples: int = 200,
                      box: float = 10.0) -> float:
        """max of v_s(z+w) / (2^(s/2) v_s(z) v_s(w)) over sampled pairs; <= 1."""
        z = rng.uniform(-box, box, size=(n_samples, 2))
        w = rng.uniform(-box, box, size=(n_samples, 2))
        v = lambda p: (1.0 + (p ** 2).sum(axis=1)) ** (self.s / 2)
        return float(np.max(v(z + w) / (2 ** (self.s / 2) * v(z) * v(w))))


@dataclass(frozen=True)
class GaborFrame:
    """A Gabor frame with its precomputed canonical tight (Parseval) window."""

    g: Signal
    lattice: Lattice
    tight: Signal
    bounds: tuple[float, float]

    @property
    def config(self) -> ModelConfig:
        return self.g.config

    def window(self, use_tight: bool = True) -> Signal:
        return self.tight if use_tight else self.g


def atom_matrix(window: Signal, lattice: Lattice) -> np.ndarray:
    """L x size matrix whose columns are pi(lambda) w in lattice order."""
    cols = [tf_shift(window, int(p[0]), int(p[1])).values for p in lattice.points()]
    return np.stack(cols, axis=1)


def build_frame(g: Signal, lat: Lattice, deficiency_rtol: float = 1e-12) -> GaborFrame:
    """Assemble the frame operator, extract bounds and the tight window.

    S = sum_lambda pi(lambda) g <., pi(lambda) g> as an L x L Hermitian matrix;
    the frame bounds are its extreme eigenvalues and the tight window is
    S^{-1/2} g via the eigendecomposition.  Raises FrameDeficient when the
    lower bound sits at the relative noise floor (rank-deficient system).
    """
    if g.norm == 0.0:
        raise WindowError("zero window")
    V = atom_matrix(g, lat)
    S = V @ V.conj().T
    evals, U = np.linalg.eigh(S)
    A_frame, B_frame = float(evals[0]), float(evals[-1])
    if A_frame <= deficiency_rtol * B_frame:
        raise FrameDeficient(
            f"lower frame bound {A_frame:.3e} at noise floor of {B_frame:.3e} "
            f"(ab = {lat.a * lat.b} vs L = {lat.config.L})")
    tight = (U * evals ** -0.5) @ (U.conj().T @ g.values)
    return GaborFrame(g=g, lattice=lat, tight=Signal(tight, g.config),
                      bounds=(A_frame, B_frame))


def analysis(frame: GaborFrame, f: Signal, use_tight: bool = True) -> CoefficientArray:
    """Coefficients <f, pi(lambda) w> over the lattice, via folded FFTs."""
    lat = frame.lattice
    L = lat.config.L
    w = frame.window(use_tight).values
    n = np.arange(L)
    out = np.empty((lat.n_time, lat.n_freq), dtype=complex)
    for j in range(lat.n_time):
        h = f.values * np.conj(np.roll(w, j * lat.a))
        # sum_n h[n] e^{-2 pi i (k b) n / L} has period L/b in n: fold and FFT
        out[j] = np.fft.fft(h.reshape(lat.b, lat.n_freq).sum(axis=0))
    return CoefficientArray(out, lat)


def synthesis(frame: GaborFrame, c: CoefficientArray, use_tight: bool = True) -> Signal:
    """sum_lambda c[lambda] pi(lambda) w; the adjoint of analysis."""
    lat = frame.lattice
    if c.lattice is not lat and (c.lattice.a, c.lattice.b, c.lattice.config.L) != (
            lat.a, lat.b, lat.config.L):
        raise ModelError("coefficient array does not match the frame lattice")
    L = lat.config.L
    w = frame.window(use_tight).values
    out = np.zeros(L, dtype=complex)
    for j in range(lat.n_time):
        env = np.tile(lat.n_freq * np.fft.ifft(c.values[j]), lat.b)
        out += np.roll(w, j * lat.a) * env
    return Signal(out, lat.config)


def modulation_norm(frame: GaborFrame, f: Signal, p: float, q: float,
                    weight: WeightSpec | None = None,
                    use_tight: bool = False) -> float:
    """Mixed-norm of the weighted Gabor coefficients.

    Inner p-norm runs over the time indices for each fixed frequency, the
    outer q-norm over the frequencies; p or q may be inf.  With p = q = 2,
    zero weight and the tight window this is exactly the l2 norm of f.
    """
    if p < 1 or q < 1:
        raise ModelError("p, q must be >= 1")
    weight = weight or WeightSpec()
    c = analysis(frame, f, use_tight=use_tight)
    wtd = np.abs(c.values) * weight.on_lattice(frame.lattice)
    if np.isinf(p):
        inner = wtd.max(axis=0)
    else:
        inner = (wtd ** p).sum(axis=0) ** (1 / p)
    if np.isinf(q):
        return float(inner.max())
    return float((inner ** q).sum() ** (1 / q))

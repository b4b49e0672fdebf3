"""Concrete operators as dense L x L matrices.

Quantization conventions (regime A, index units):

* Kohn-Nirenberg:   (T f)[n] = L^{-1/2} sum_m e^{2 pi i n m / L} sigma[n, m] (F f)[m],
  so sigma = 1 gives exactly the identity.
* FIO type I:       (T f)[n] = L^{-1/2} sum_m e^{2 pi i Phi[n, m]} sigma[n, m] (F f)[m],
  with the discrete phase Phi[n, m] in "turns" (the exponent of e^{2 pi i .}).
* FIO type II is normalized as the adjoint counterpart of type I: with
  tau[a, b] read in (frequency, time) order inside the kernel,

      (T f)[n] = L^{-1} sum_{n', m} e^{-2 pi i (Phi[n', m] - n m / L)} tau[m, n'] f[n'],

  which realizes the adjoint relation fio_type2(Phi, tau) = fio_type1(Phi, rho)^*
  with tau[n, m] = conj(rho[m, n]) entrywise.

Regime-A phases are integer quadratic forms (alpha n^2 + 2 beta n m + gamma m^2) / (2L)
plus linear terms; L even makes them L-periodic, and beta a unit mod L makes the
FIO with flat symbol unitary.  Regime-B phases sample a tame phase on the grid
(x_n, xi_m) with a half-turn correction m/2 coming from the x-grid offset -T/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import ModelError, UnitError
from .phasegeom import CanonicalMap, TamePhase, canonical_map_of_phase, linear_map
from .tfcore import ModelConfig, Signal, wrap_half

__all__ = [
    "SymbolGrid", "OperatorMatrix", "DiscretePhase", "MetaplecticWord",
    "kn_quantize", "kn_symbol_of", "fio_type1", "fio_type2", "metaplectic",
    "adjoint", "compose", "type1_symbol_of",
    "kn_phase", "quadratic_phase", "discrete_phase_from_tame",
    "symbol_ones", "symbol_multiplier", "random_smooth_symbol",
    "identity_operator", "chirp_operator", "dft_operator", "dilation_operator",
    "multiplier_operator",
]


@dataclass(frozen=True)
class SymbolGrid:
    """A symbol sampled on the (time, frequency) grid: values[n, m]."""

    values: np.ndarray
    config: ModelConfig

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        L = self.config.L
        if v.shape != (L, L):
            raise ModelError(f"symbol shape {v.shape} != ({L}, {L})")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class OperatorMatrix:
    """A dense operator kernel acting on signals, with a provenance tag."""

    entries: np.ndarray
    config: ModelConfig
    tag: str = "explicit"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        L = self.config.L
        if e.shape != (L, L):
            raise ModelError(f"operator shape {e.shape} != ({L}, {L})")
        object.__setattr__(self, "entries", e)

    def apply(self, f: Signal) -> Signal:
        if f.config.L != self.config.L:
            raise ModelError("operator/signal length mismatch")
        return Signal(self.entries @ f.values, self.config)

    def norm2(self) -> float:
        """Spectral norm (dense SVD)."""
        return float(np.linalg.norm(self.entries, 2))


@dataclass(frozen=True)
class DiscretePhase:
    """A sampled phase Phi[n, m], in turns, with optional provenance.

    For regime-A quadratic phases the coefficients (alpha, beta, gamma) of
    (alpha n^2 + 2 beta n m + gamma m^2)/(2L) are kept so the induced linear
    canonical map is available exactly.
    """

    values: np.ndarray
    config: ModelConfig
    quad: tuple[float, float, float] | None = None
    tame: TamePhase | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        L = self.config.L
        if v.shape != (L, L):
            raise ModelError(f"phase shape {v.shape} != ({L}, {L})")
        object.__setattr__(self, "values", v)

    def canonical_map(self) -> CanonicalMap:
        """The induced map on the index-unit time-frequency plane.

        For integer quadratics with beta a unit mod L the map is returned as
        an integer matrix acting on the torus (division by beta becomes the
        modular inverse), so inverses and compositions stay exact mod L.
        """
        if self.quad is not None:
            alpha, beta, gamma = self.quad
            if beta == 0:
                raise ModelError("degenerate quadratic phase (beta = 0)")
            L = self.config.L
            ints = all(v == int(v) for v in self.quad)
            if ints and gcd(int(beta) % L, L) == 1:
                binv = pow(int(beta) % L, -1, L)
                m = np.array([[binv, -int(gamma) * binv],
                              [int(alpha) * binv,
                               int(beta) - int(alpha) * int(gamma) * binv]])
                m = (m + L // 2) % L - L // 2
                return linear_map(m.astype(float), source="quadratic-phase",
                                  mod_L=L)
            m = np.array([[1 / beta, -gamma / beta],
                          [alpha / beta, beta - alpha * gamma / beta]])
            return linear_map(m, source="quadratic-phase")
        if self.tame is not None:
            return index_map_of_tame(self.tame, self.config)
        raise ModelError("phase has no canonical-map provenance")


def kn_phase(config: ModelConfig) -> DiscretePhase:
    """The Kohn-Nirenberg phase Phi[n, m] = n m / L (quadratic with beta = 1)."""
    return quadratic_phase(config, 0, 1, 0)


def quadratic_phase(config: ModelConfig, alpha: int, beta: int, gamma: int,
                    lin: tuple[int, int] = (0, 0)) -> DiscretePhase:
    """Integer quadratic phase (alpha n^2 + 2 beta n m + gamma m^2)/(2L) + linear.

    Integer coefficients and even L make exp(2 pi i Phi) L-periodic in both
    indices; beta must be nonzero for a nondegenerate canonical map and a
    unit mod L for exact unitarity of the flat-symbol FIO.
    """
    for name, val in (("alpha", alpha), ("beta", beta), ("gamma", gamma),
                      ("lin0", lin[0]), ("lin1", lin[1])):
        if val != int(val):
            raise ModelError(f"regime-A quadratic phase needs integer {name}, got {val}")
    L = config.L
    n = np.arange(L, dtype=float)
    N, M = np.meshgrid(n, n, indexing="ij")
    vals = (alpha * N ** 2 + 2 * beta * N * M + gamma * M ** 2) / (2 * L) \
        + (lin[0] * N + lin[1] * M) / L
    return DiscretePhase(vals, config, quad=(float(alpha), float(beta), float(gamma)))


def index_map_of_tame(phi: TamePhase, config: ModelConfig) -> CanonicalMap:
    """chi of a tame phase rescaled to grid-index units.

    Regime B: index (k, m) corresponds to the continuous shift (k T/L, m/T);
    the continuous map is conjugated by that scaling.  Regime A uses the
    toroidal scaling where Phi is sampled as Phi(n, m)/L, giving the same
    index-unit map as the quadratic formulas.
    """
    chi = canonical_map_of_phase(phi)
    if config.regime == "A":
        return chi
    T, L = config.T, config.L

    def fwd(k, m):
        x, xi = chi.forward(k * T / L, m / T)
        return x * L / T, xi * T

    return CanonicalMap(fwd, source=f"index({chi.source})",
                        lipschitz_est=chi.lipschitz_est * max(T * T / L, L / (T * T)))


def discrete_phase_from_tame(phi: TamePhase, config: ModelConfig) -> DiscretePhase:
    """Sample a tame phase on the model grid.

    Regime B samples Phi(x_n, xi_m) plus the half-turn correction m/2 that
    absorbs the -T/2 grid offset (so Phi(x, xi) = x xi reproduces the exact
    Kohn-Nirenberg phase).  Regime A samples Phi(n, wrap(m))/L, exact for
    integer quadratics and approximate otherwise.
    """
    L = config.L
    m_idx = np.arange(L)
    if config.regime == "B":
        x = config.time_grid()
        xi = config.freq_grid()
        vals = np.empty((L, L))
        for n in range(L):
            vals[n] = [phi.eval(x[n], xi[m]) + m / 2 for m in m_idx]
    else:
        mw = wrap_half(m_idx, L)
        vals = np.empty((L, L))
        for n in range(L):
            vals[n] = [phi.eval(float(n), float(mw[m])) / L for m in m_idx]
    return DiscretePhase(vals, config, tame=phi)


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------

def kn_quantize(sigma: SymbolGrid) -> OperatorMatrix:
    """Kohn-Nirenberg quantization; kernel T[n, n'] = L^-1 sum_m sigma[n, m] e^{2 pi i m (n-n')/L}."""
    L = sigma.config.L
    B = np.fft.ifft(sigma.values, axis=1)          # B[n, u] = L^-1 sum_m sigma e^{2 pi i m u/L}
    n = np.arange(L)
    T = B[n[:, None], (n[:, None] - n[None, :]) % L]
    return OperatorMatrix(T, sigma.config, tag="kn")


def kn_symbol_of(T: OperatorMatrix) -> SymbolGrid:
    """Exact inverse of kn_quantize: sigma[n, m] = sum_u T[n, (n-u) mod L] e^{-2 pi i m u / L}."""
    L = T.config.L
    n = np.arange(L)
    A = T.entries[n[:, None], (n[:, None] - n[None, :]) % L]
    return SymbolGrid(np.fft.fft(A, axis=1), T.config)


def fio_type1(phi: DiscretePhase, sigma: SymbolGrid) -> OperatorMatrix:
    """Type-I FIO: (T f)[n] = L^{-1/2} sum_m e^{2 pi i Phi[n, m]} sigma[n, m] (F f)[m]."""
    if phi.config.L != sigma.config.L:
        raise ModelError("phase/symbol size mismatch")
    A = np.exp(2j * np.pi * phi.values) * sigma.values
    return OperatorMatrix(np.fft.fft(A, axis=1) / phi.config.L, phi.config, tag="fio1")


def fio_type2(phi: DiscretePhase, tau: SymbolGrid) -> OperatorMatrix:
    """Type-II FIO, the adjoint-side oscillatory integral.

    Normalized so that fio_type2(phi, tau) equals adjoint(fio_type1(phi, rho))
    entrywise when tau[n, m] = conj(rho[m, n]).
    """
    if phi.config.L != tau.config.L:
        raise ModelError("phase/symbol size mismatch")
    B = np.exp(-2j * np.pi * phi.values.T) * tau.values
    return OperatorMatrix(np.fft.ifft(B, axis=0), phi.config, tag="fio2")


def type1_symbol_of(T: OperatorMatrix, phi: DiscretePhase) -> SymbolGrid:
    """The type-I symbol of T relative to the phase phi.

    From e^{2 pi i Phi} sigma_I = e^{2 pi i n m / L} sigma_KN (row-wise DFT
    expansions of the kernel agree), so sigma_I = e^{2 pi i (nm/L - Phi)} sigma_KN.
    """
    L = T.config.L
    n = np.arange(L, dtype=float)
    knp = np.outer(n, n) / L
    sig = kn_symbol_of(T)
    return SymbolGrid(np.exp(2j * np.pi * (knp - phi.values)) * sig.values, T.config)


def adjoint(T: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(T.entries.conj().T, T.config, tag="adjoint")


def compose(T1: OperatorMatrix, T2: OperatorMatrix) -> OperatorMatrix:
    if T1.config.L != T2.config.L:
        raise ModelError("operator size mismatch")
    return OperatorMatrix(T1.entries @ T2.entries, T1.config, tag="product")


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def symbol_ones(config: ModelConfig) -> SymbolGrid:
    return SymbolGrid(np.ones((config.L, config.L)), config)


def symbol_multiplier(config: ModelConfig, values: np.ndarray) -> SymbolGrid:
    """Frequency-independent symbol sigma[n, m] = values[n] (a multiplication operator)."""
    v = np.asarray(values, dtype=complex)
    return SymbolGrid(np.repeat(v[:, None], config.L, axis=1), config)


def random_smooth_symbol(config: ModelConfig, rng: np.random.Generator,
                         bandwidth: int = 2) -> SymbolGrid:
    """Random trigonometric polynomial on Z_L^2 with modes |q| <= bandwidth,
    normalized to unit sup norm.  Smooth in the discrete sense: its KN
    operator is a short combination of small time-frequency shifts."""
    L = config.L
    c = np.zeros((L, L), dtype=complex)
    for q1 in range(-bandwidth, bandwidth + 1):
        for q2 in range(-bandwidth, bandwidth + 1):
            c[q1 % L, q2 % L] = rng.normal() + 1j * rng.normal()
    vals = np.fft.ifft2(c) * L * L
    return SymbolGrid(vals / np.abs(vals).max(), config)


# ---------------------------------------------------------------------------
# metaplectic generators and words
# ---------------------------------------------------------------------------

def identity_operator(config: ModelConfig) -> OperatorMatrix:
    return OperatorMatrix(np.eye(config.L), config, tag="identity")


def chirp_operator(config: ModelConfig, c: int = 1) -> OperatorMatrix:
    """diag(exp(pi i c n^2 / L)); canonical map [[1, 0], [c, 1]]."""
    n = np.arange(config.L)
    return OperatorMatrix(np.diag(np.exp(1j * np.pi * c * n ** 2 / config.L)),
                          config, tag="metaplectic")


def dft_operator(config: ModelConfig) -> OperatorMatrix:
    """Unitary DFT; canonical map -J = [[0, 1], [-1, 0]]."""
    L = config.L
    return OperatorMatrix(np.fft.fft(np.eye(L)) / np.sqrt(L), config, tag="metaplectic")


def dilation_operator(config: ModelConfig, u: int) -> OperatorMatrix:
    """f[n] -> f[u^{-1} n mod L]; canonical map diag(u, u^{-1} mod L)."""
    L = config.L
    if gcd(u % L, L) != 1:
        raise UnitError(f"dilation argument {u} is not a unit mod {L}")
    uinv = pow(u % L, -1, L)
    P = np.zeros((L, L))
    n = np.arange(L)
    P[n, (uinv * n) % L] = 1.0
    return OperatorMatrix(P, config, tag="metaplectic")


def multiplier_operator(config: ModelConfig, amp: float = 0.1) -> OperatorMatrix:
    """diag(1 + amp cos(2 pi n / L)), a smooth multiplication operator."""
    n = np.arange(config.L)
    return OperatorMatrix(np.diag(1 + amp * np.cos(2 * np.pi * n / config.L)),
                          config, tag="kn")


@dataclass(frozen=True)
class MetaplecticWord:
    """A word in the generators dft, chirp(c), dilate(u).

    Concatenation maps to operator products in the same order:
    word [g1, g2] realizes U(g1) U(g2) and accumulates A(g1) A(g2).
    The accumulated matrix is tracked in SL(2, Z_L) (integer entries mod L,
    used for wrapped displacements) together with its real lift.
    """

    generators: tuple
    config: ModelConfig

    def __post_init__(self):
        gens = []
        for g in self.generators:
            kind = g[0]
            if kind == "dft":
                gens.append(("dft",))
            elif kind == "chirp":
                c = int(g[1])
                gens.append(("chirp", c))
            elif kind == "dilate":
                u = int(g[1]) % self.config.L
                if gcd(u, self.config.L) != 1:
                    raise UnitError(f"dilation argument {g[1]} is not a unit mod {self.config.L}")
                gens.append(("dilate", u))
            else:
                raise ModelError(f"unknown generator {g!r}")
        object.__setattr__(self, "generators", tuple(gens))

    def matrix_modL(self) -> np.ndarray:
        """Accumulated symplectic matrix with integer entries (not reduced)."""
        L = self.config.L
        M = np.eye(2, dtype=np.int64)
        for g in self.generators:
            if g[0] == "dft":
                G = np.array([[0, 1], [-1, 0]], dtype=np.int64)
            elif g[0] == "chirp":
                G = np.array([[1, 0], [g[1], 1]], dtype=np.int64)
            else:
                G = np.array([[g[1], 0], [0, pow(g[1], -1, L)]], dtype=np.int64)
            M = M @ G
        return M

    def matrix_real(self) -> np.ndarray:
        """Real symplectic lift (dilations use 1/u instead of u^{-1} mod L)."""
        M = np.eye(2)
        for g in self.generators:
            if g[0] == "dft":
                G = np.array([[0.0, 1.0], [-1.0, 0.0]])
            elif g[0] == "chirp":
                G = np.array([[1.0, 0.0], [float(g[1]), 1.0]])
            else:
                G = np.diag([float(g[1]), 1.0 / float(g[1])])
            M = M @ G
        return M

    def __add__(self, other: "MetaplecticWord") -> "MetaplecticWord":
        if other.config.L != self.config.L:
            raise ModelError("cannot concatenate words over different configs")
        return MetaplecticWord(self.generators + other.generators, self.config)


def metaplectic(word: MetaplecticWord,
                config: ModelConfig | None = None) -> tuple[OperatorMatrix, CanonicalMap]:
    """Assemble the unitary of a generator word and its linear canonical map.

    The intertwining U pi(z) U^* = c pi(A z mod L) holds exactly for every
    generator (and hence every word) in regime A; the scalar c is unimodular
    and not tracked beyond that.
    """
    config = config or word.config
    U = np.eye(config.L, dtype=complex)
    for g in word.generators:
        if g[0] == "dft":
            G = dft_operator(config).entries
        elif g[0] == "chirp":
            G = chirp_operator(config, g[1]).entries
        else:
            G = dilation_operator(config, g[1]).entries
        U = U @ G
    chi = linear_map(word.matrix_modL().astype(float), source="metaplectic-word",
                     mod_L=config.L)
    return OperatorMatrix(U, config, tag="metaplectic"), chi

"""Gabor matrices of operators and their decay anatomy.

The Gabor matrix of T over a frame with windows w is

    K[mu, lam] = <T pi(lam) w, pi(mu) w>,

assembled as K = V^H (T V) where V has the atoms pi(lam) w as columns.  The
decay of |K| is measured against a canonical transformation chi through the
wrapped displacement d = mu - chi(lam), componentwise reduced to [-L/2, L/2)
in grid-index units.

Decay fit convention
--------------------
Displacements are binned geometrically in <d> = sqrt(1 + |d|^2) with ratio
sqrt(2); each bin keeps the sup of |K| (the decay condition is a sup bound).
The exponent is the slope of log envelope against log bin distance by least
squares *weighted by bin occupancy*: the outermost torus bins hold only the
corner sliver of displacements (orders of magnitude fewer samples), and
unweighted fitting lets that sliver fake a steep slope on profiles that are
actually flat.  The unweighted variant is kept as an option.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import FitError, ModelError, SizeError
from .gabor import CoefficientArray, GaborFrame, atom_matrix
from .operators import OperatorMatrix, SymbolGrid
from .phasegeom import CanonicalMap
from .tfcore import Signal, stft, tf_shift, wrap_half

__all__ = [
    "GaborMatrix", "DecayProfile", "SparseGaborMatrix", "OffgridReport",
    "SymbolClassReport", "gabor_matrix", "decay_profile", "offgraph_max",
    "offgrid_decay_check", "sparsify", "sparse_apply", "schur_bound",
    "symbol_class_norm", "gabor_matrix_to_csv", "gabor_matrix_from_csv",
    "profile_to_csv",
]

SYMBOL_CLASS_MAX_L = 128   # the 2d-STFT sweep is an L^4 computation


@dataclass(frozen=True)
class GaborMatrix:
    """Gabor coefficients of an operator over a frame's lattice.

    entries[mu_idx, lam_idx] = <T pi(lam) w, pi(mu) w> in the lattice's
    time-major enumeration; w is the tight window unless the matrix was
    assembled with use_tight=False.
    """

    entries: np.ndarray
    frame: GaborFrame
    chi: CanonicalMap | None = None
    window_kind: str = "tight"

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        N = self.frame.lattice.size
        if e.shape != (N, N):
            raise ModelError(f"Gabor-matrix shape {e.shape} != ({N}, {N})")
        object.__setattr__(self, "entries", e)

    @property
    def lattice(self):
        return self.frame.lattice


@dataclass(frozen=True)
class DecayProfile:
    """Binned envelope of |K| against <mu - chi(lam)> with the fitted exponent."""

    bins: list                 # (distance, envelope, count) triples
    s_fit: float
    C_fit: float
    r2: float
    weighted: bool = True

    def table(self) -> np.ndarray:
        return np.array([(d, e, c) for d, e, c in self.bins])


@dataclass(frozen=True)
class SparseGaborMatrix:
    """Thresholded Gabor matrix in CSR form with its discarded Schur mass."""

    matrix: sp.csr_matrix
    threshold: float
    kept_fraction: float
    dropped_schur_mass: float
    lattice_shape: tuple[int, int]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz


@dataclass(frozen=True)
class OffgridReport:
    C_lattice: float
    C_offgrid: float
    ratio: float
    offsets: list


@dataclass(frozen=True)
class SymbolClassReport:
    norm: float
    envelope: np.ndarray       # sup over z of |V_Psi sigma(z, zeta)|, indexed by zeta
    s_sym: float
    bins: list


def gabor_matrix(T: OperatorMatrix, frame: GaborFrame,
                 use_tight: bool = True,
                 chi: CanonicalMap | None = None) -> GaborMatrix:
    """Assemble K = V^H T V over the frame lattice (column-per-atom dense applies).

    The default window is the canonical tight window; use_tight=False scans
    against the frame's generating window instead (the decay class does not
    depend on the window, only the constants do).
    """
    if T.config.L != frame.config.L:
        raise ModelError("operator/frame size mismatch")
    V = atom_matrix(frame.window(use_tight), frame.lattice)
    K = V.conj().T @ (T.entries @ V)
    return GaborMatrix(K, frame, chi=chi,
                       window_kind="tight" if use_tight else "raw")


def _chi_points(chi, points: np.ndarray) -> np.ndarray:
    """Apply a CanonicalMap, 2x2 matrix, or callable to (N, 2) index points."""
    if isinstance(chi, CanonicalMap):
        return chi.map_points(points)
    arr = np.asarray(chi, dtype=float) if not callable(chi) else None
    if arr is not None and arr.shape == (2, 2):
        return points @ arr.T
    if callable(chi):
        return np.array([chi(float(p[0]), float(p[1])) for p in points])
    raise ModelError(f"cannot interpret chi of type {type(chi)!r}")


def wrapped_displacements(K: GaborMatrix, chi) -> np.ndarray:
    """d[mu_idx, lam_idx, :] = wrap(mu - chi(lam)) in index units.

    Lattice points are reduced to the fundamental window [-L/2, L/2) before
    applying chi: a torus shift has no preferred lift, and nonlinear maps
    must see the canonical representative (linear integer maps are unaffected
    mod L).
    """
    pts = K.lattice.points().astype(float)
    L = K.frame.config.L
    img = _chi_points(chi, wrap_half(pts, L))
    d1 = wrap_half(pts[:, 0][:, None] - img[:, 0][None, :], L)
    d2 = wrap_half(pts[:, 1][:, None] - img[:, 1][None, :], L)
    return np.stack([d1, d2], axis=-1)


def envelope_fit(dists: np.ndarray, values: np.ndarray,
                 fit_min_dist: float = 2.0, min_count: int = 3,
                 weighted: bool = True):
    """Shared binning + fit: geometric sqrt(2) bins of the bracketed
    distances <d> (>= 1, computed by the caller), sup envelope per bin,
    (weighted) least squares of log envelope on log distance.

    Returns (bins, s_fit, C_fit, r2) and raises FitError with fewer than
    four eligible bins.
    """
    dist = np.asarray(dists, dtype=float).ravel()
    vals = np.abs(np.asarray(values)).ravel()
    idx = np.floor(np.log(dist) / np.log(np.sqrt(2))).astype(int)
    nb = int(idx.max()) + 1
    env = np.zeros(nb)
    cnt = np.zeros(nb, dtype=int)
    np.maximum.at(env, idx, vals)
    np.add.at(cnt, idx, 1)
    dr = np.sqrt(2.0) ** (np.arange(nb) + 0.5)
    sel = (cnt >= min_count) & (dr >= fit_min_dist) & (env > 0)
    if sel.sum() < 4:
        raise FitError(f"only {int(sel.sum())} eligible bins, need >= 4")
    x = np.log(dr[sel])
    y = np.log(env[sel])
    w = cnt[sel].astype(float) if weighted else np.ones(sel.sum())
    w = w / w.sum()
    xm = float((w * x).sum())
    ym = float((w * y).sum())
    slope = float((w * (x - xm) * (y - ym)).sum() / (w * (x - xm) ** 2).sum())
    yhat = ym + slope * (x - xm)
    ss_tot = float((w * (y - ym) ** 2).sum())
    r2 = 1.0 - float((w * (y - yhat) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    s_fit = -slope
    C_fit = float(np.max(vals * dist ** s_fit))
    bins = [(float(dr[i]), float(env[i]), int(cnt[i])) for i in range(nb) if cnt[i]]
    return bins, s_fit, C_fit, r2


def decay_profile(K: GaborMatrix, chi=None, fit_min_dist: float = 2.0,
                  min_count: int = 3, weighted: bool = True) -> DecayProfile:
    """Fit |K[mu, lam]| <= C <mu - chi(lam)>^{-s} over the lattice."""
    chi = chi if chi is not None else K.chi
    if chi is None:
        raise ModelError("no canonical map attached or supplied")
    d = wrapped_displacements(K, chi)
    dist = np.sqrt(1.0 + (d ** 2).sum(axis=-1))
    bins, s_fit, C_fit, r2 = envelope_fit(dist, K.entries, fit_min_dist,
                                          min_count, weighted)
    return DecayProfile(bins=bins, s_fit=s_fit, C_fit=C_fit, r2=r2,
                        weighted=weighted)


def offgraph_max(K: GaborMatrix, chi, min_steps: float = 8.0) -> float:
    """Largest |K| (relative to the peak) at lattice-step distance >= min_steps
    from the graph mu = chi(lam); steps scale the wrapped displacement by
    (1/a, 1/b)."""
    d = wrapped_displacements(K, chi)
    lat = K.lattice
    steps = np.sqrt((d[..., 0] / lat.a) ** 2 + (d[..., 1] / lat.b) ** 2)
    absK = np.abs(K.entries)
    mask = steps >= min_steps
    if not mask.any():
        return 0.0
    return float(absK[mask].max() / absK.max())


def _offsets_for(lat, n_offsets: int) -> list:
    """Deterministic fractional-multiple offsets realized on the unit lattice:
    diagonal fractions j/(n+1) of a cell first (half-cell included when n >= 2),
    then axis-aligned fractions as fillers."""
    diag, axis = [], []
    for j in range(1, n_offsets + 1):
        t = j / (n_offsets + 1)
        c = (round(lat.a * t), round(lat.b * t))
        if c != (0, 0) and c not in diag:
            diag.append(c)
        for c in ((round(lat.a * t), 0), (0, round(lat.b * t))):
            if c != (0, 0) and c not in axis and c not in diag:
                axis.append(c)
    return (diag + [c for c in axis if c not in diag])[:n_offsets]


def offgrid_decay_check(T: OperatorMatrix, frame: GaborFrame, chi, s: float,
                        n_offsets: int = 3) -> OffgridReport:
    """Compare the decay constant over the lattice with shifted copies (regime A).

    C(X) = max over z in X_z, w' in X_w of |<T pi(z) w, pi(w') w>| <w'-chi(z)>^s,
    where the X's run over the lattice and over lattice copies shifted by
    off-grid offsets u on the unit lattice.  The continuous/discrete
    equivalence predicts a bounded ratio.
    """
    if frame.config.regime != "A":
        raise ModelError("off-grid check is a regime-A (exact torus) operation")
    lat = frame.lattice
    L = frame.config.L
    pts = lat.points().astype(float)
    w = frame.tight
    offsets = [(0, 0)] + _offsets_for(lat, n_offsets)

    # For each z-offset, compute <T pi(z) w, pi(w') w> for ALL w' via one STFT
    # per z; then any w'-offset is a slice of the full grid.
    grids = {}
    for u in offsets:
        cols = np.empty((lat.size, L, L), dtype=complex)
        for i, p in enumerate(pts):
            atom = tf_shift(w, int(p[0] + u[0]), int(p[1] + u[1]))
            cols[i] = stft(Signal(T.entries @ atom.values, T.config), w).values
        grids[u] = cols

    def constant(u_z, u_w):
        cols = grids[u_z]
        z = pts + np.array(u_z, dtype=float)
        img = _chi_points(chi, wrap_half(z, L))
        wpts = (pts + np.array(u_w, dtype=float)).astype(int)
        vals = np.abs(cols[:, wpts[:, 0] % L, wpts[:, 1] % L])   # [z_idx, w_idx]
        d1 = wrap_half(wpts[None, :, 0] - img[:, 0][:, None], L)
        d2 = wrap_half(wpts[None, :, 1] - img[:, 1][:, None], L)
        wt = (1.0 + d1 ** 2 + d2 ** 2) ** (s / 2)
        return float((vals * wt).max())

    C_lattice = constant((0, 0), (0, 0))
    C_offgrid = max(constant(uz, uw) for uz in offsets for uw in offsets)
    return OffgridReport(C_lattice=C_lattice, C_offgrid=C_offgrid,
                         ratio=C_offgrid / C_lattice, offsets=offsets[1:])


def sparsify(K: GaborMatrix, tau: float) -> SparseGaborMatrix:
    """Keep entries with |K| >= tau; record the Schur mass of what was dropped."""
    if tau < 0:
        raise ModelError("threshold must be >= 0")
    absK = np.abs(K.entries)
    keep = absK >= tau
    dropped = np.where(keep, 0.0, absK)
    mass = max(dropped.sum(axis=1).max(), dropped.sum(axis=0).max()) \
        if (~keep).any() else 0.0
    mat = sp.csr_matrix(np.where(keep, K.entries, 0.0))
    lat = K.lattice
    return SparseGaborMatrix(matrix=mat, threshold=float(tau),
                             kept_fraction=float(keep.mean()),
                             dropped_schur_mass=float(mass),
                             lattice_shape=(lat.n_time, lat.n_freq))


def sparse_apply(Ks: SparseGaborMatrix, c: CoefficientArray) -> CoefficientArray:
    """Sparse matrix-vector product on coefficient arrays (cost ~ kept entries)."""
    if (c.lattice.n_time, c.lattice.n_freq) != Ks.lattice_shape:
        raise ModelError("coefficient index set does not match the sparse matrix")
    out = Ks.matrix @ c.ravel()
    return CoefficientArray.from_flat(out, c.lattice)


def schur_bound(K) -> float:
    """max(max_mu sum_lam |K|, max_lam sum_mu |K|): an upper bound for the
    l2 operator norm of the matrix (Schur's test)."""
    if isinstance(K, GaborMatrix):
        A = np.abs(K.entries)
    elif isinstance(K, SparseGaborMatrix):
        A = np.abs(K.matrix)
        return float(max(A.sum(axis=1).max(), A.sum(axis=0).max()))
    else:
        A = np.abs(np.asarray(K))
    return float(max(A.sum(axis=1).max(), A.sum(axis=0).max()))


def symbol_class_norm(sigma: SymbolGrid, s: float,
                      window2d: SymbolGrid | None = None) -> SymbolClassReport:
    """Weighted sup of the 2d STFT of a symbol: sup_z sup_zeta |V_Psi sigma| <zeta>^s.

    Streams over the L^2 translates z (an L^4 log L computation overall), so
    L is capped at SYMBOL_CLASS_MAX_L.  Also fits the decay exponent of the
    envelope sup_z |V_Psi sigma(z, .)| with the shared binning machinery.
    """
    L = sigma.config.L
    if L > SYMBOL_CLASS_MAX_L:
        raise SizeError(f"symbol_class_norm capped at L = {SYMBOL_CLASS_MAX_L}")
    if window2d is None:
        from .tfcore import periodized_gaussian
        g = periodized_gaussian(sigma.config).values
        Psi = np.outer(g, g)
    else:
        Psi = window2d.values
    if np.linalg.norm(Psi) == 0:
        raise ModelError("zero 2d window")
    env = np.zeros((L, L))
    for z1 in range(L):
        P1 = np.roll(Psi, z1, axis=0)
        for z2 in range(L):
            F = np.fft.fft2(sigma.values * np.conj(np.roll(P1, z2, axis=1)))
            np.maximum(env, np.abs(F), out=env)
    zw = wrap_half(np.arange(L), L)
    dist = np.sqrt(1.0 + zw[:, None] ** 2 + zw[None, :] ** 2)
    norm = float((env * dist ** s).max())
    bins, s_sym, _, _ = envelope_fit(dist, env)
    return SymbolClassReport(norm=norm, envelope=env, s_sym=s_sym, bins=bins)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def gabor_matrix_to_csv(K: GaborMatrix, path) -> None:
    """Write rows (mu_k, mu_m, lam_k, lam_m, re, im) in lattice order."""
    pts = K.lattice.points()
    with open(path, "w", newline="") as fh:
        wtr = csv.writer(fh)
        wtr.writerow(["mu_k", "mu_m", "lam_k", "lam_m", "re", "im"])
        for i, mu in enumerate(pts):
            for j, lam in enumerate(pts):
                v = K.entries[i, j]
                wtr.writerow([mu[0], mu[1], lam[0], lam[1],
                              repr(float(v.real)), repr(float(v.imag))])


def gabor_matrix_from_csv(path, frame: GaborFrame) -> GaborMatrix:
    """Read the layout written by gabor_matrix_to_csv back over a frame."""
    lat = frame.lattice
    index = {(int(p[0]), int(p[1])): i for i, p in enumerate(lat.points())}
    K = np.zeros((lat.size, lat.size), dtype=complex)
    with open(path, newline="") as fh:
        rdr = csv.reader(fh)
        header = next(rdr)
        if header[:4] != ["mu_k", "mu_m", "lam_k", "lam_m"]:
            raise ModelError("unrecognized Gabor-matrix CSV header")
        for row in rdr:
            mu = index[(int(row[0]), int(row[1]))]
            lam = index[(int(row[2]), int(row[3]))]
            K[mu, lam] = float(row[4]) + 1j * float(row[5])
    return GaborMatrix(K, frame)


def profile_to_csv(profile: DecayProfile, path) -> None:
    """Write (bin_dist, envelope, count) rows plus log10 columns for plotting."""
    with open(path, "w", newline="") as fh:
        wtr = csv.writer(fh)
        wtr.writerow(["bin_dist", "envelope", "count", "log10_dist", "log10_envelope"])
        for d, e, c in profile.bins:
            wtr.writerow([repr(float(d)), repr(float(e)), c,
                          repr(float(np.log10(d))),
                          repr(float(np.log10(e))) if e > 0 else ""])

"""Tame phases and canonical transformations (dimension d = 1).

A phase Phi(x, eta) is tame when its second derivatives are bounded and the
mixed derivative is bounded away from zero.  Solving

    y  = dPhi/deta (x, eta)
    xi = dPhi/dx   (x, eta)

for (x, xi) defines the canonical transformation chi(y, eta) = (x, xi), which
is symplectic.  In d = 1 the solve is a scalar Newton iteration in x with a
monotone residual (the mixed derivative has fixed sign), with a bracketing
bisection fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import ModelError, NondegeneracyViolation, SolveError

__all__ = [
    "TamePhase", "CanonicalMap", "SymplecticMatrix", "TameReport",
    "EquivalenceReport", "validate_tame", "canonical_map_of_phase",
    "phase_of_symplectic", "check_symplectic", "phase_chi_equivalence",
    "linear_map", "compose_maps", "tame_phase",
]

_FD_STEP = 1e-5          # central-difference step for Jacobians
_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 50


@dataclass(frozen=True)
class TamePhase:
    """A smooth real phase with derivative oracles and declared tameness bounds.

    ``hess(x, eta)`` returns the symmetric 2x2 matrix
    [[Phi_xx, Phi_xeta], [Phi_etax, Phi_etaeta]].  ``declared_C2`` bounds all
    second derivatives, ``declared_delta`` lower-bounds |Phi_xeta|; both are
    author claims, checked by sampling in :func:`validate_tame`.
    """

    eval: Callable[[float, float], float]
    grad_x: Callable[[float, float], float]
    grad_eta: Callable[[float, float], float]
    hess: Callable[[float, float], np.ndarray]
    declared_C2: float
    declared_delta: float
    name: str = ""


@dataclass(frozen=True)
class TameReport:
    C2_observed: float
    delta_observed: float
    passed: bool


@dataclass(frozen=True)
class EquivalenceReport:
    ratio_min: float
    ratio_max: float
    passed: bool


@dataclass(frozen=True)
class SymplecticMatrix:
    """A real 2x2 symplectic matrix (d = 1: blocks A, B, C, D are scalars)."""

    entries: np.ndarray

    J = np.array([[0.0, -1.0], [1.0, 0.0]])

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (2, 2):
            raise ModelError("symplectic matrix must be 2x2")
        if np.abs(m.T @ self.J @ m - self.J).max() > 1e-12:
            raise ModelError("matrix does not preserve the symplectic form")
        object.__setattr__(self, "entries", m)

    @property
    def A(self): return float(self.entries[0, 0])
    @property
    def B(self): return float(self.entries[0, 1])
    @property
    def C(self): return float(self.entries[1, 0])
    @property
    def D(self): return float(self.entries[1, 1])

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix(np.array([[self.D, -self.B], [-self.C, self.A]]))


@dataclass(frozen=True)
class CanonicalMap:
    """A map chi of the time-frequency plane with a Jacobian oracle.

    ``forward`` maps a pair (y, eta) to (x, xi).  For linear maps the matrix
    is stored and everything is exact; otherwise Jacobians fall back on
    central differences with step 1e-5.

    ``mod_L`` marks an integer matrix acting on the torus Z_L^2.  Such maps
    are inverted by the adjugate reduced mod L (their determinant is 1 mod L
    but generally not 1 over the reals, so the real inverse would be wrong).
    """

    forward: Callable[[float, float], tuple[float, float]]
    source: str = "explicit"
    matrix: np.ndarray | None = None
    lipschitz_est: float = np.inf
    mod_L: int | None = None
    _inverse_fn: Callable[[float, float], tuple[float, float]] | None = None

    def __call__(self, y: float, eta: float) -> tuple[float, float]:
        return self.forward(y, eta)

    def map_points(self, points: np.ndarray) -> np.ndarray:
        """Apply to an (N, 2) array of points."""
        pts = np.asarray(points, dtype=float)
        if self.matrix is not None:
            return pts @ self.matrix.T
        return np.array([self.forward(y, eta) for y, eta in pts])

    def jacobian(self, y: float, eta: float) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix.copy()
        h = _FD_STEP
        fx1 = np.array(self.forward(y + h, eta)); fx0 = np.array(self.forward(y - h, eta))
        fe1 = np.array(self.forward(y, eta + h)); fe0 = np.array(self.forward(y, eta - h))
        return np.stack([(fx1 - fx0) / (2 * h), (fe1 - fe0) / (2 * h)], axis=1)

    def inverse(self) -> "CanonicalMap":
        """Exact inverse for linear maps; Newton on the forward map otherwise."""
        if self.matrix is not None:
            m = self.matrix
            if self.mod_L is not None:
                adj = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
                inv = _mod_rep(adj, self.mod_L)
            else:
                inv = np.linalg.inv(m)
            return linear_map(inv, source=f"inverse({self.source})",
                              mod_L=self.mod_L)
        if self._inverse_fn is not None:
            return CanonicalMap(self._inverse_fn, source=f"inverse({self.source})",
                                lipschitz_est=self.lipschitz_est,
                                _inverse_fn=self.forward)

        def back(x, xi, _fwd=self.forward, _jac=self.jacobian):
            z = np.array([x, xi], dtype=float)
            target = z.copy()
            for _ in range(_NEWTON_MAXIT):
                r = np.array(_fwd(*z)) - target
                if np.abs(r).max() < _NEWTON_TOL:
                    return float(z[0]), float(z[1])
                z = z - np.linalg.solve(_jac(*z), r)
            raise SolveError("2d Newton inversion stagnated")

        return CanonicalMap(back, source=f"inverse({self.source})",
                            lipschitz_est=self.lipschitz_est,
                            _inverse_fn=self.forward)


def _mod_rep(m: np.ndarray, L: int) -> np.ndarray:
    """Symmetric mod-L representative of an integer matrix."""
    return (m + L // 2) % L - L // 2


def linear_map(matrix: np.ndarray, source: str = "linear",
               mod_L: int | None = None) -> CanonicalMap:
    m = np.asarray(matrix, dtype=float)
    return CanonicalMap(lambda y, eta: tuple(m @ (y, eta)), source=source,
                        matrix=m, lipschitz_est=float(np.linalg.norm(m, 2)),
                        mod_L=mod_L)


def compose_maps(chi1: CanonicalMap, chi2: CanonicalMap) -> CanonicalMap:
    """chi1 o chi2 (apply chi2 first), matching operator composition T1 T2."""
    if chi1.matrix is not None and chi2.matrix is not None:
        mod = chi1.mod_L if chi1.mod_L == chi2.mod_L else None
        prod = chi1.matrix @ chi2.matrix
        return linear_map(prod if mod is None else _mod_rep(prod, mod),
                          source=f"{chi1.source}*{chi2.source}", mod_L=mod)
    return CanonicalMap(lambda y, eta: chi1.forward(*chi2.forward(y, eta)),
                        source=f"{chi1.source}*{chi2.source}",
                        lipschitz_est=chi1.lipschitz_est * chi2.lipschitz_est)


def _sample_grid(box, n_samples):
    (x0, x1), (e0, e1) = box
    n = max(int(np.ceil(np.sqrt(n_samples))), 2)
    xs = np.linspace(x0, x1, n)
    es = np.linspace(e0, e1, n)
    return [(x, e) for x in xs for e in es]


def validate_tame(phi: TamePhase, box=((-4.0, 4.0), (-4.0, 4.0)),
                  n_samples: int = 400) -> TameReport:
    """Sample the Hessian over the box and compare with the declared bounds."""
    if n_samples < 100:
        raise ModelError("n_samples must be >= 100")
    C2 = 0.0
    delta = np.inf
    for x, e in _sample_grid(box, n_samples):
        H = np.asarray(phi.hess(x, e), dtype=float)
        C2 = max(C2, float(np.abs(H).max()))
        delta = min(delta, float(abs(H[0, 1])))
    passed = (delta >= phi.declared_delta * (1 - 1e-6)
              and C2 <= phi.declared_C2 * (1 + 1e-6))
    return TameReport(C2_observed=C2, delta_observed=delta, passed=passed)


def _solve_x(phi: TamePhase, y: float, eta: float) -> float:
    """Solve y = dPhi/deta(x, eta) for x: Newton from x0 = y, bisection fallback."""
    x = float(y)
    for _ in range(_NEWTON_MAXIT):
        r = phi.grad_eta(x, eta) - y
        if abs(r) < _NEWTON_TOL:
            return x
        d = phi.hess(x, eta)[1, 0]
        if d == 0.0:
            break
        x = x - r / d
    # residual is monotone in x (|Phi_xeta| >= delta), so bracket and bisect
    resid = lambda t: phi.grad_eta(t, eta) - y
    r0 = resid(x)
    if abs(r0) < _NEWTON_TOL:
        return x
    radius = max(1.0, abs(x))
    for _ in range(60):
        lo, hi = x - radius, x + radius
        if resid(lo) * resid(hi) < 0:
            sol = brentq(resid, lo, hi, xtol=1e-14)
            if abs(resid(sol)) < 1e-10:
                return float(sol)
            break
        radius *= 2
    raise SolveError(
        f"canonical-map solve stagnated at (y, eta)=({y}, {eta}); "
        "check the derivative oracles")


def canonical_map_of_phase(phi: TamePhase) -> CanonicalMap:
    """The canonical transformation chi(y, eta) = (x, xi) induced by phi."""

    def fwd(y, eta):
        x = _solve_x(phi, y, eta)
        return x, float(phi.grad_x(x, eta))

    def back(x, xi):
        # same machinery with the roles swapped: xi = Phi_x(x, eta) is
        # monotone in eta, then y = Phi_eta(x, eta)
        eta = float(x)
        for _ in range(_NEWTON_MAXIT):
            r = phi.grad_x(x, eta) - xi
            if abs(r) < _NEWTON_TOL:
                return float(phi.grad_eta(x, eta)), eta
            d = phi.hess(x, eta)[0, 1]
            if d == 0.0:
                break
            eta = eta - r / d
        resid = lambda t: phi.grad_x(x, t) - xi
        radius = max(1.0, abs(eta))
        for _ in range(60):
            lo, hi = eta - radius, eta + radius
            if resid(lo) * resid(hi) < 0:
                eta = brentq(resid, lo, hi, xtol=1e-14)
                return float(phi.grad_eta(x, eta)), float(eta)
            radius *= 2
        raise SolveError("inverse canonical-map solve stagnated")

    # rough Lipschitz estimate from sampled finite-difference Jacobians;
    # points where the solve fails are skipped (the error surfaces on use)
    chi = CanonicalMap(fwd, source=f"from_phase({phi.name})", _inverse_fn=back)
    lip = 0.0
    for x, e in _sample_grid(((-4, 4), (-4, 4)), 25):
        try:
            lip = max(lip, float(np.linalg.norm(chi.jacobian(x, e), 2)))
        except SolveError:
            lip = np.inf
            break
    object.__setattr__(chi, "lipschitz_est", lip)
    return chi


def phase_of_symplectic(M: SymplecticMatrix, delta_min: float = 0.1) -> TamePhase:
    """The quadratic phase generating z -> M z:

        Phi(x, eta) = (C/A) x^2 / 2 + (1/A) x eta - (B/A) eta^2 / 2.

    Requires |A| >= delta_min (condition B3); the Fourier-transform side
    A = 0 has no type-I phase and raises NondegeneracyViolation.
    """
    if abs(M.A) < delta_min:
        raise NondegeneracyViolation(
            f"|A block| = {abs(M.A):.3e} < {delta_min}: no type-I phase exists")
    p = M.C / M.A      # x^2/2 coefficient
    q = 1.0 / M.A      # x eta coefficient
    r = -M.B / M.A     # eta^2/2 coefficient
    H = np.array([[p, q], [q, r]])
    return TamePhase(
        eval=lambda x, e: 0.5 * p * x * x + q * x * e + 0.5 * r * e * e,
        grad_x=lambda x, e: p * x + q * e,
        grad_eta=lambda x, e: q * x + r * e,
        hess=lambda x, e: H.copy(),
        declared_C2=float(np.abs(H).max()),
        declared_delta=abs(q),
        name=f"metaplectic({M.A:g},{M.B:g},{M.C:g},{M.D:g})",
    )


def check_symplectic(chi: CanonicalMap, points) -> float:
    """max over points of the largest entry of |Dchi^T J Dchi - J|."""
    J = SymplecticMatrix.J
    dev = 0.0
    for y, eta in np.asarray(points, dtype=float):
        D = chi.jacobian(y, eta)
        dev = max(dev, float(np.abs(D.T @ J @ D - J).max()))
    return dev


def phase_chi_equivalence(phi: TamePhase, n_quadruples: int = 1000,
                          box: float = 4.0, rng: np.random.Generator | None = None,
                          eps: float = 1e-9,
                          bounds: tuple[float, float] = (1e-3, 1e3),
                          chi: CanonicalMap | None = None) -> EquivalenceReport:
    """Sampled two-sided comparison

        |grad_x Phi(x',eta) - eta'| + |grad_eta Phi(x',eta) - x|
        ~ |chi_1(x,eta) - x'| + |chi_2(x,eta) - eta'|

    over random quadruples; the ratio of the two sides (regularized by eps)
    must stay inside ``bounds``.
    """
    rng = rng or np.random.default_rng(0)
    chi = chi or canonical_map_of_phase(phi)
    ratios = np.empty(n_quadruples)
    for i in range(n_quadruples):
        x, xp, eta, etap = rng.uniform(-box, box, size=4)
        lhs = abs(phi.grad_x(xp, eta) - etap) + abs(phi.grad_eta(xp, eta) - x)
        c1, c2 = chi.forward(x, eta)
        rhs = abs(c1 - xp) + abs(c2 - etap)
        ratios[i] = (lhs + eps) / (rhs + eps)
    rmin, rmax = float(ratios.min()), float(ratios.max())
    return EquivalenceReport(ratio_min=rmin, ratio_max=rmax,
                             passed=bounds[0] <= rmin and rmax <= bounds[1])


# ---------------------------------------------------------------------------
# built-in phase catalog
# ---------------------------------------------------------------------------

def _kn_phase() -> TamePhase:
    H = np.array([[0.0, 1.0], [1.0, 0.0]])
    return TamePhase(
        eval=lambda x, e: x * e,
        grad_x=lambda x, e: e,
        grad_eta=lambda x, e: x,
        hess=lambda x, e: H.copy(),
        declared_C2=1.0, declared_delta=1.0, name="kn")


def _chirp_phase(c: float) -> TamePhase:
    H = np.array([[c, 1.0], [1.0, 0.0]])
    return TamePhase(
        eval=lambda x, e: 0.5 * c * x * x + x * e,
        grad_x=lambda x, e: c * x + e,
        grad_eta=lambda x, e: x,
        hess=lambda x, e: H.copy(),
        declared_C2=max(abs(c), 1.0), declared_delta=1.0, name=f"chirp:{c:g}")


def _sine_phase(eps: float, px: float, pe: float, name: str) -> TamePhase:
    """Phi = x eta + eps (px pe / 4 pi^2) sin(2 pi x / px) sin(2 pi eta / pe).

    The amplitude is scaled so the mixed second derivative is exactly
    1 + eps cos cos; with px = pe = 2 pi this is the plain sin(x) sin(eta)
    perturbation.  Choosing px = T and pe = L/T makes the phase smooth on
    the regime-B torus (no seam at the wrap boundary).
    """
    if not 0 <= eps < 1:
        raise ModelError("perturbation strength must lie in [0, 1)")
    wx, we = 2 * np.pi / px, 2 * np.pi / pe
    A = eps / (wx * we)
    return TamePhase(
        eval=lambda x, e: x * e + A * np.sin(wx * x) * np.sin(we * e),
        grad_x=lambda x, e: e + A * wx * np.cos(wx * x) * np.sin(we * e),
        grad_eta=lambda x, e: x + A * we * np.sin(wx * x) * np.cos(we * e),
        hess=lambda x, e: np.array([
            [-A * wx * wx * np.sin(wx * x) * np.sin(we * e),
             1 + eps * np.cos(wx * x) * np.cos(we * e)],
            [1 + eps * np.cos(wx * x) * np.cos(we * e),
             -A * we * we * np.sin(wx * x) * np.sin(we * e)]]),
        declared_C2=1.0 + max(eps, eps * wx / we, eps * we / wx),
        declared_delta=1.0 - eps,
        name=name)


def _perturbed_phase(eps: float) -> TamePhase:
    return _sine_phase(eps, 2 * np.pi, 2 * np.pi, f"perturbed:{eps:g}")


def tame_phase(spec: str) -> TamePhase:
    """Look up a phase by name: ``kn``, ``chirp:c``, ``metaplectic:a,b,c,d``,
    ``perturbed:eps``, or ``sine:eps:px:pe`` (perturbation with explicit
    periods, e.g. matched to a sampled-line grid)."""
    head, _, arg = spec.partition(":")
    if head == "kn":
        return _kn_phase()
    if head == "chirp":
        return _chirp_phase(float(arg))
    if head == "perturbed":
        return _perturbed_phase(float(arg))
    if head == "sine":
        parts = arg.split(":")
        eps = float(parts[0])
        px = float(parts[1]) if len(parts) > 1 else 2 * np.pi
        pe = float(parts[2]) if len(parts) > 2 else 2 * np.pi
        return _sine_phase(eps, px, pe, f"sine:{eps:g}:{px:g}:{pe:g}")
    if head == "metaplectic":
        a, b, c, d = (float(t) for t in arg.split(","))
        return phase_of_symplectic(SymplecticMatrix(np.array([[a, b], [c, d]])))
    raise ModelError(f"unknown phase spec {spec!r}")

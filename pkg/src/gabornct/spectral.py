"""Contour-integral functional calculus and inversion inside the twisted algebra.

The inversion experiments are finite-dimensional: a matrix on C^L cannot tell
a weighted coefficient algebra from the full operator algebra. What they do
show is quantitative. The inverse of a well-localized element, recovered as
coefficients, keeps a fast and stable decay profile as ``L`` grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._parallel import ordered_sum, pmap
from .algebra import (
    TwistedSeq,
    WeightSpec,
    coefficients_from_operator,
    fold,
    janssen_coefficients,
    represent,
    twisted_involution,
    twisted_product,
    weighted_norm,
)
from .errors import ConditioningError, ContourError, NotInvertibleError, NumericalError, ParameterError
from .gabor import frame_bounds, frame_operator_matrix
from .report import Report, csv_text
from .tf_core import LatticeSpec, adjoint_lattice, as_signal
from .windows import WindowFamily, make_window

S_LADDER = (0, 1, 2, 4, 8)
CONTOUR_MARGIN = 0.05
INVERSE_RCOND = 1e-12


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    is_hermitian: bool

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    @property
    def min_real(self) -> float:
        return float(np.min(self.eigenvalues.real))

    @property
    def max_imag(self) -> float:
        return float(np.max(np.abs(self.eigenvalues.imag)))

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues,
            "spectral_radius": self.spectral_radius,
            "min_real": self.min_real,
            "max_imag": self.max_imag,
            "is_hermitian": self.is_hermitian,
        }


def _is_hermitian(M: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(M - M.conj().T)) <= 1e-12 * scale)


def operator_spectrum(M) -> SpectrumReport:
    """All eigenvalues of a square matrix, sorted by real then imaginary part."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {M.shape}")
    herm = _is_hermitian(M)
    try:
        ev = np.linalg.eigvalsh(M).astype(complex) if herm else np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    ev = ev[np.lexsort((ev.imag, ev.real))]
    return SpectrumReport(ev, herm)


# -- holomorphic calculus ---------------------------------------------------


@dataclass(frozen=True)
class ContourSpec:
    """Circle ``|z - center| = radius`` sampled at ``nodes`` equispaced points."""

    center: complex
    radius: float
    nodes: int = 256

    def __post_init__(self):
        if not self.radius > 0:
            raise ContourError(f"contour radius must be positive, got {self.radius}")
        if self.nodes < 16:
            raise ContourError(f"need at least 16 quadrature nodes, got {self.nodes}")

    def points(self):
        phi = 2 * np.pi * np.arange(self.nodes) / self.nodes
        direction = np.exp(1j * phi)
        return complex(self.center) + self.radius * direction, direction


def _distance_to_singularities(center: complex, kind: str) -> float:
    if kind == "pole":
        return abs(center)
    if kind == "cut":
        # distance from the centre to the branch cut (-inf, 0]
        return abs(center.imag) if center.real <= 0 else abs(center)
    return float("inf")


def default_contour(eigenvalues, nodes: int = 256, kind: str = "pole") -> ContourSpec:
    """Circle around the spectrum with padding ``0.1 max(1, |lambda|_max)``.

    For real spectra this is centred at the midpoint of ``[lambda_min,
    lambda_max]`` with radius half its length plus the padding. If that
    circle would reach the singular set of the function (``kind`` is
    ``"pole"`` or ``"cut"``) the padding is halved toward it instead. For
    entire functions the radius is doubled: nothing limits it, and the
    trapezoid error falls like ``(reach / radius)^nodes``.
    """
    ev = np.asarray(eigenvalues, dtype=complex)
    center = complex((ev.real.min() + ev.real.max()) / 2, (ev.imag.min() + ev.imag.max()) / 2)
    reach = float(np.max(np.abs(ev - center)))
    pad = 0.1 * max(1.0, float(np.max(np.abs(ev))))
    if kind == "entire":
        return ContourSpec(center, 2 * (reach + pad), nodes)
    room = _distance_to_singularities(center, kind) - reach
    if room > 0 and pad >= room:
        pad = room / 2
    return ContourSpec(center, reach + pad, nodes)


def _named_function(f) -> tuple[Callable[[complex], complex], str, str]:
    """``(callable, label, kind)`` where ``kind`` describes the singular set."""
    if isinstance(f, tuple) and len(f) == 2 and f[0] == "power":
        nu = float(f[1])
        if nu == int(nu) and nu >= 0:
            return (lambda z: z ** int(nu)), f"power({nu:g})", "entire"
        if nu == int(nu):
            return (lambda z: z ** int(nu)), f"power({nu:g})", "pole"
        return (lambda z: np.exp(nu * np.log(z))), f"power({nu:g})", "cut"
    if f == "inverse":
        return (lambda z: 1.0 / z), "inverse", "pole"
    if f == "inverse_sqrt":
        return (lambda z: 1.0 / np.sqrt(z)), "inverse_sqrt", "cut"
    if f == "exp":
        return np.exp, "exp", "entire"
    raise ParameterError(f"unknown function {f!r}; expected inverse, inverse_sqrt, exp or ('power', nu)")


def _check_contour(ev: np.ndarray, c: ContourSpec, kind: str) -> None:
    dist = np.abs(ev - c.center)
    if np.any(dist > (1 - CONTOUR_MARGIN) * c.radius):
        raise ContourError(
            f"contour (center {c.center}, radius {c.radius:.6g}) does not enclose the spectrum "
            f"with margin {CONTOUR_MARGIN}: farthest eigenvalue at distance {dist.max():.6g}"
        )
    if _distance_to_singularities(complex(c.center), kind) <= c.radius:
        where = "the singularity at 0" if kind == "pole" else "the branch cut (-inf, 0]"
        raise ContourError(f"the contour meets {where}")


def riesz_dunford(M, f, contour: ContourSpec | None = None, nodes: int = 256, workers: int = 1) -> np.ndarray:
    """``(1 / 2 pi i) * contour integral of f(z) (z I - M)^-1 dz`` by the trapezoid rule.

    On a circle the integrand is periodic and analytic, so the rule converges
    geometrically in ``nodes``. Node contributions are summed in a fixed
    order, independent of ``workers``.
    """
    M = np.asarray(M, dtype=complex)
    fn, _, kind = _named_function(f)
    ev = operator_spectrum(M).eigenvalues
    c = contour if contour is not None else default_contour(ev, nodes, kind)
    _check_contour(ev, c, kind)
    z, direction = c.points()
    n = M.shape[0]
    eye = np.eye(n, dtype=complex)
    gap = float(np.min(np.abs(z[:, None] - ev[None, :])))
    if gap < 1e-12 * max(1.0, float(np.max(np.abs(ev)))):
        raise ConditioningError(f"quadrature node within {gap:.3e} of the spectrum")

    def node(j):
        try:
            R = np.linalg.solve(z[j] * eye - M, eye)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError(f"resolvent solve failed at z={z[j]}: {exc}") from exc
        return (fn(z[j]) * c.radius * direction[j]) * R

    return ordered_sum(pmap(node, range(c.nodes), workers)) / c.nodes


def eig_calculus(M, f) -> np.ndarray:
    """Same function of a Hermitian matrix by eigendecomposition."""
    M = np.asarray(M, dtype=complex)
    fn, _, _ = _named_function(f)
    ev, V = np.linalg.eigh(M)
    return (V * fn(ev.astype(complex))) @ V.conj().T


# -- inversion inside the algebra --------------------------------------------


def inverse_residuals(a: TwistedSeq, b: TwistedSeq, spec: LatticeSpec) -> tuple[float, float]:
    """``(||a # b - e||_1, ||b # a - e||_1)`` in the algebra folded onto ``spec``.

    Products are formed without pruning so that no rounding residue is
    dropped from the certificate.
    """
    return _unit_residual(a, b, spec), _unit_residual(b, a, spec)


def _unit_residual(a: TwistedSeq, b: TwistedSeq, spec: LatticeSpec) -> float:
    p = fold(twisted_product(a, b, prune=0.0), spec, prune=0.0)
    vals = np.array(p.values)
    origin = np.flatnonzero((p.keys[:, 0] == 0) & (p.keys[:, 1] == 0))
    if len(origin):
        vals[origin[0]] -= 1.0
        return math.fsum(np.abs(vals))
    return math.fsum(np.abs(vals)) + 1.0


def invert_in_algebra(a: TwistedSeq, spec: LatticeSpec, tol: float = 1e-8) -> TwistedSeq:
    """Coefficients of ``represent(a)^-1`` with a two-sided product certificate.

    Raises :class:`NotInvertibleError` when the smallest singular value of
    the representation is below ``INVERSE_RCOND`` times the largest, and
    :class:`NumericalError` when either residual of the certificate
    exceeds ``tol``.
    """
    M = represent(a, spec)
    sv = np.linalg.svd(M, compute_uv=False)
    if not sv[-1] > INVERSE_RCOND * sv[0]:
        raise NotInvertibleError(
            f"representation is singular (min singular value {sv[-1]:.3e})", float(sv[-1])
        )
    b = coefficients_from_operator(np.linalg.inv(M), spec)
    left, right = inverse_residuals(a, b, spec)
    if max(left, right) >= tol:
        raise NumericalError(f"inverse certificate failed: residuals {left:.3e}, {right:.3e}")
    return b


# -- decay profiles ---------------------------------------------------------


@dataclass(frozen=True)
class DecayProfile:
    """Shell masses ``m_r = sum_{max(|k|,|l|) = r} |a_kl|`` with fitted decay.

    ``rate`` is the exponential rate ``rho`` and ``poly_order`` the power
    ``p`` in ``m_r ~ r^(-p) exp(-rho r)``, both from one least-squares fit
    over ``fit_range``. With fewer than three usable shells only ``rho`` is
    fitted and ``p`` is NaN.
    """

    masses: np.ndarray
    rate: float
    poly_order: float
    fit_range: tuple[int, int]
    s_ladder: dict = field(default_factory=dict)

    @property
    def radii(self) -> np.ndarray:
        return np.arange(len(self.masses))

    @property
    def total(self) -> float:
        return math.fsum(self.masses)

    def monotone_from(self, r0: int = 1) -> bool:
        m = self.masses[r0:]
        return bool(np.all(np.diff(m) < 0))

    def csv(self) -> str:
        rows = [
            (int(r), float(m), float(math.log(m)) if m > 0 else float("-inf"))
            for r, m in zip(self.radii, self.masses)
        ]
        return csv_text(["shell", "mass", "log_mass"], rows)

    def to_dict(self) -> dict:
        return {
            "masses": self.masses,
            "rate": self.rate,
            "poly_order": self.poly_order,
            "fit_range": list(self.fit_range),
            "s_ladder": {str(s): v for s, v in self.s_ladder.items()},
        }


def shell_masses(a: TwistedSeq) -> np.ndarray:
    if not len(a):
        return np.zeros(0)
    r = np.max(np.abs(a.keys), axis=1)
    mags = np.abs(a.values)
    return np.array([math.fsum(mags[r == j]) for j in range(int(r.max()) + 1)])


def fit_decay(masses, fit_range: tuple[int, int] | None = None, floor: float = 1e-13) -> tuple[float, float, tuple[int, int]]:
    """Fit ``log m_r = c - rho r - p log r`` over shells in ``fit_range``.

    The default range is shell 1 to the last shell; shells whose mass is at
    most ``floor`` times the total are left out. Returns ``(rho, p, range)``,
    with NaN where too few shells remain.
    """
    m = np.asarray(masses, dtype=float)
    if fit_range is None:
        fit_range = (1, len(m) - 1)
    lo, hi = fit_range
    r = np.arange(len(m))
    total = m.sum()
    use = (r >= max(lo, 1)) & (r <= hi) & (m > floor * total)
    r, y = r[use].astype(float), np.log(m[use])
    if len(r) >= 3:
        X = np.stack([np.ones_like(r), r, np.log(r)], axis=1)
        coef = np.linalg.lstsq(X, y, rcond=None)[0]
        return float(-coef[1]), float(-coef[2]), (int(lo), int(hi))
    if len(r) == 2:
        rho = -(y[1] - y[0]) / (r[1] - r[0])
        return float(rho), float("nan"), (int(lo), int(hi))
    return float("nan"), float("nan"), (int(lo), int(hi))


def decay_profile(a: TwistedSeq, fit_range: tuple[int, int] | None = None, floor: float = 1e-13) -> DecayProfile:
    masses = shell_masses(a)
    rate, order, rng = fit_decay(masses, fit_range, floor)
    ladder = {s: weighted_norm(a, WeightSpec(s, a.alpha, a.beta)) for s in S_LADDER}
    return DecayProfile(masses, rate, order, rng, ladder)


# -- spectral radius and symmetry -------------------------------------------


def spectral_radius_compare(a: TwistedSeq, spec: LatticeSpec | None = None, jmax: int = 6) -> Report:
    """Normalized norms ``r_j = ||a^(2^j)||_1^(1 / 2^j)`` against the operator radius.

    The algebra side works for any ``theta``; the operator side needs a
    lattice whose ``theta`` matches.
    """
    if not 0 <= jmax <= 8:
        raise ParameterError(f"jmax must lie in [0, 8], got {jmax}")
    hermitian = (a - twisted_involution(a)).norm() <= 1e-12 * max(1.0, a.norm())
    rs = []
    p = a
    for j in range(jmax + 1):
        if j:
            p = twisted_product(p, p)
        rs.append(p.norm() ** (1.0 / 2**j))
    data = {
        "theta": a.theta,
        "hermitian": hermitian,
        "jmax": jmax,
        "r": rs,
        "non_increasing": bool(all(y <= x * (1 + 1e-12) for x, y in zip(rs, rs[1:]))),
    }
    if spec is not None:
        r_op = operator_spectrum(represent(a, spec)).spectral_radius
        data.update(r_op=r_op, gap=abs(rs[-1] - r_op))
    return Report("radius-compare", data)


def symmetry_probe(a: TwistedSeq, spec: LatticeSpec) -> SpectrumReport:
    """Spectrum of ``represent(a # a*)``, which is real and non-negative."""
    return operator_spectrum(represent(twisted_product(a, twisted_involution(a)), spec))


# -- the Gaussian inversion experiment --------------------------------------


def gaussian_lattice(L: int, alpha: float = 0.5, beta: float = 1.0) -> LatticeSpec:
    """Lattice ``(alpha sqrt(L), beta sqrt(L))``; both steps must be integers dividing ``L``."""
    root = math.isqrt(L)
    a, b = alpha * root, beta * root
    if root * root != L or a != int(a) or b != int(b):
        raise ParameterError(f"L={L} does not give integer steps for alpha={alpha}, beta={beta}")
    return LatticeSpec(L, int(a), int(b))


def dual_window_via_algebra(g, spec: LatticeSpec) -> np.ndarray:
    """Canonical dual window ``S^-1 g`` obtained by inverting Janssen coefficients."""
    g = as_signal(g, spec.L)
    adj = adjoint_lattice(spec)
    seq, _ = janssen_coefficients(g, g, spec)
    return represent(invert_in_algebra(seq, adj), adj) @ g


def gaussian_inverse_run(L: int, sigma: float = 1.0, alpha: float = 0.5, beta: float = 1.0, workers: int = 1) -> dict:
    """Invert the Janssen coefficients of a Gaussian frame operator and profile the inverse."""
    spec = gaussian_lattice(L, alpha, beta)
    adj = adjoint_lattice(spec)
    g = make_window(WindowFamily("gaussian", L, sigma))
    seq, S = janssen_coefficients(g, g, spec)
    rebuild = float(np.linalg.norm(S - frame_operator_matrix(g, g, spec, workers=workers)))
    inv = invert_in_algebra(seq, adj)
    left, right = inverse_residuals(seq, inv, adj)
    prof = decay_profile(inv)
    bounds = frame_bounds(g, spec, workers=workers)
    return {
        "L": L,
        "a": spec.a,
        "b": spec.b,
        "redundancy": spec.redundancy,
        "frame_cond": bounds.cond,
        "janssen_rebuild": rebuild,
        "left_residual": left,
        "right_residual": right,
        "monotone_beyond_1": prof.monotone_from(1),
        "profile": prof,
    }


def spectral_invariance_sweep(
    Ls: Sequence[int] = (36, 64, 100, 144), sigma: float = 1.0, alpha: float = 0.5, beta: float = 1.0, workers: int = 1
) -> Report:
    """Decay of inverse coefficients across ``L``, with rate spread relative to the largest ``L``."""
    runs = [gaussian_inverse_run(L, sigma, alpha, beta, workers) for L in Ls]
    ref = runs[-1]["profile"].rate
    spread = max(abs(r["profile"].rate / ref - 1) for r in runs)
    return Report(
        "spectral-invariance",
        {
            "runs": runs,
            "reference_rate": ref,
            "max_relative_rate_deviation": spread,
            "max_residual": max(max(r["left_residual"], r["right_residual"]) for r in runs),
            "all_monotone": all(r["monotone_beyond_1"] for r in runs),
        },
    )

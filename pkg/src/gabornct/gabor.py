"""Gabor systems on Z_L together with their frame operators and dual windows.

Inner products are linear in the first slot and conjugate-linear in the
second, ``<f, h> = sum(f * conj(h))``. A coefficient grid is an array of shape
``(L // a, L // b)`` whose entry ``[k, l]`` belongs to the lattice point
``(a k, b l)``.

The finite constant relating sums over the lattice to sums over its adjoint
is ``C = L / (a b)`` (the redundancy); it replaces the factor
``(alpha beta)^(-d)`` of the continuous theory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._parallel import ordered_sum, pmap
from .errors import DimensionError, NotAFrameError, NumericalError, ParameterError
from .report import Report
from .tf_core import LatticeSpec, adjoint_lattice, as_signal, tf_shift

FRAME_RTOL = 1e-10


def inner(f, h) -> complex:
    return complex(np.vdot(h, f))


def figa_constant(spec: LatticeSpec) -> float:
    return float(Fraction(spec.L, spec.a * spec.b))


@dataclass(frozen=True, eq=False)
class GaborSystem:
    """Window ``g`` together with the lattice it is shifted along."""

    g: np.ndarray
    spec: LatticeSpec

    def __post_init__(self):
        g = as_signal(self.g, self.spec.L)
        if not np.linalg.norm(g) > 0:
            raise ParameterError("window must be non-zero")
        object.__setattr__(self, "g", g)

    def analysis(self, f, workers: int = 1) -> np.ndarray:
        return analysis(self, f, workers=workers)

    def synthesis(self, c, workers: int = 1) -> np.ndarray:
        return synthesis(self, c, workers=workers)

    def frame_operator(self, workers: int = 1) -> np.ndarray:
        return frame_operator_matrix(self.g, self.g, self.spec, workers=workers)


def analysis(sys: GaborSystem, f, workers: int = 1) -> np.ndarray:
    """Coefficients ``<f, pi(a k, b l) g>`` on the lattice."""
    spec = sys.spec
    f = as_signal(f, spec.L)
    cg = np.conj(sys.g)

    def row(k):
        spectrum = np.fft.fft(f * np.roll(cg, spec.a * k))
        return spectrum[:: spec.b]

    return np.array(pmap(row, range(spec.n_time), workers))


def synthesis(sys: GaborSystem, c, workers: int = 1) -> np.ndarray:
    """``sum_{k,l} c[k, l] pi(a k, b l) g``; the adjoint of :func:`analysis`."""
    spec = sys.spec
    c = np.asarray(c, dtype=complex)
    if c.shape != (spec.n_time, spec.n_freq):
        raise DimensionError(f"coefficient grid has shape {c.shape}, expected {(spec.n_time, spec.n_freq)}")

    def term(k):
        line = np.zeros(spec.L, dtype=complex)
        line[:: spec.b] = c[k]
        return np.roll(sys.g, spec.a * k) * (spec.L * np.fft.ifft(line))

    return ordered_sum(pmap(term, range(spec.n_time), workers))


def frame_operator_matrix(g, gamma, spec: LatticeSpec, workers: int = 1) -> np.ndarray:
    """Dense matrix of ``f -> sum_lambda <f, pi(lambda) gamma> pi(lambda) g``.

    Summing the modulations in closed form leaves the Walnut structure:
    entry ``[t, s]`` vanishes unless ``t = s mod L/b``.
    """
    g = as_signal(g, spec.L)
    gamma = as_signal(gamma, spec.L)
    t = np.arange(spec.L)
    mask = ((t[:, None] - t[None, :]) % spec.n_freq == 0) * float(spec.n_freq)

    def block(k):
        shift = spec.a * k
        return np.outer(np.roll(g, shift), np.conj(np.roll(gamma, shift)))

    return ordered_sum(pmap(block, range(spec.n_time), workers)) * mask


@dataclass(frozen=True)
class FrameBounds:
    A: float
    B: float
    tol: float

    @property
    def cond(self) -> float:
        return self.B / self.A if self.A > 0 else float("inf")

    @property
    def is_frame(self) -> bool:
        return self.A > self.tol

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "cond": self.cond, "is_frame": self.is_frame}


def _bounds_from_eigenvalues(ev: np.ndarray) -> FrameBounds:
    B = float(ev[-1])
    A = max(float(ev[0]), 0.0)
    return FrameBounds(A, B, FRAME_RTOL * B)


def frame_bounds(g, spec: LatticeSpec, workers: int = 1) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator."""
    S = frame_operator_matrix(g, g, spec, workers=workers)
    try:
        ev = np.linalg.eigvalsh(S)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    return _bounds_from_eigenvalues(ev)


def operator_power(S, nu: float) -> np.ndarray:
    """``S**nu`` for a Hermitian positive definite ``S``, by eigendecomposition."""
    ev, V = np.linalg.eigh(S)
    bounds = _bounds_from_eigenvalues(ev)
    if not bounds.is_frame:
        raise NotAFrameError(f"operator is singular: A={bounds.A:.3e}, B={bounds.B:.3e}")
    return (V * ev**nu) @ V.conj().T


def power_window(g, spec: LatticeSpec, nu: float, workers: int = 1) -> np.ndarray:
    """``S**nu g`` for the frame operator ``S`` of ``(g, spec)``.

    ``nu = -1`` gives the canonical dual window and ``nu = -1/2`` the
    canonical tight (Parseval) window.
    """
    g = as_signal(g, spec.L)
    S = frame_operator_matrix(g, g, spec, workers=workers)
    return operator_power(S, nu) @ g


def dual_window(g, spec: LatticeSpec, workers: int = 1) -> np.ndarray:
    return power_window(g, spec, -1.0, workers=workers)


def tight_window(g, spec: LatticeSpec, workers: int = 1) -> np.ndarray:
    return power_window(g, spec, -0.5, workers=workers)


def reconstruct(f, g, gamma, spec: LatticeSpec, workers: int = 1) -> np.ndarray:
    """``sum_lambda <f, pi(lambda) g> pi(lambda) gamma``."""
    c = analysis(GaborSystem(g, spec), f, workers=workers)
    return synthesis(GaborSystem(gamma, spec), c, workers=workers)


def wexler_raz_check(g, gamma, spec: LatticeSpec, tol: float = 1e-8) -> Report:
    """Biorthogonality of ``gamma`` and ``g`` over the adjoint lattice.

    Computes ``C <pi(mu) gamma, pi(mu') g>`` for all adjoint points and its
    largest deviation from the identity, and cross-checks the verdict
    against ``S_{g,gamma} = I`` computed directly.
    """
    g = as_signal(g, spec.L)
    gamma = as_signal(gamma, spec.L)
    C = figa_constant(spec)
    pts = adjoint_lattice(spec).points()
    shifted_gamma = np.stack([tf_shift(gamma, p) for p in pts], axis=1)
    shifted_g = np.stack([tf_shift(g, p) for p in pts], axis=1)
    gram = C * (shifted_g.conj().T @ shifted_gamma)
    dev = np.abs(gram - np.eye(len(pts)))
    off = dev.copy()
    np.fill_diagonal(off, 0.0)
    S = frame_operator_matrix(g, gamma, spec)
    frame_residual = float(np.max(np.abs(S - np.eye(spec.L))))
    max_dev = float(dev.max())
    return Report(
        "wexler-raz",
        {
            "constant": C,
            "adjoint_points": len(pts),
            "diagonal_value": complex(C * inner(gamma, g)),
            "max_deviation": max_dev,
            "max_offdiagonal": float(off.max()),
            "frame_operator_residual": frame_residual,
            "biorthogonal": max_dev < tol,
            "dual_pair": frame_residual < tol,
            "consistent": (max_dev < tol) == (frame_residual < tol),
        },
    )


def figa_sides(f1, f2, g1, g2, spec: LatticeSpec):
    """Both sides of the fundamental identity, summed directly.

    Returns ``(lhs, rhs)`` with ``lhs = sum_Lambda <f1, pi g1><pi g2, f2>`` and
    ``rhs = sum_Adjoint <g2, pi g1><pi f1, f2>``; the identity is
    ``lhs = C * rhs``.
    """
    f1, f2, g1, g2 = (as_signal(v, spec.L) for v in (f1, f2, g1, g2))
    lhs = sum(inner(f1, tf_shift(g1, p)) * inner(tf_shift(g2, p), f2) for p in spec.points())
    rhs = sum(
        inner(g2, tf_shift(g1, p)) * inner(tf_shift(f1, p), f2)
        for p in adjoint_lattice(spec).points()
    )
    return complex(lhs), complex(rhs)


def figa_residual(f1, f2, g1, g2, spec: LatticeSpec) -> float:
    lhs, rhs = figa_sides(f1, f2, g1, g2, spec)
    return abs(lhs - figa_constant(spec) * rhs)

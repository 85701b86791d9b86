"""Time-frequency shifts on the cyclic group Z_L.

A signal is a complex vector of length L. The shift by a point (x, w) of the
time-frequency plane Z_L x Z_L acts as modulation after translation::

    pi(x, w) f[t] = exp(2 pi i w t / L) * f[(t - x) mod L]

and two shifts compose up to the phase ``exp(-2 pi i x eta / L)``. All phases
are evaluated from an integer exponent reduced mod L, so identical exponents
give bit-identical phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Tuple, Union

import numpy as np

from .errors import DimensionError, LatticeError

PointLike = Union["TFPoint", Tuple[int, int]]


class TFPoint(NamedTuple):
    """A point (x, w) of Z_L x Z_L."""

    x: int
    w: int

    @classmethod
    def reduced(cls, p: PointLike, L: int) -> "TFPoint":
        return cls(int(p[0]) % L, int(p[1]) % L)

    def __neg__(self) -> "TFPoint":
        return TFPoint(-self.x, -self.w)


@lru_cache(maxsize=64)
def _roots(L: int) -> np.ndarray:
    r = np.exp(2j * np.pi * np.arange(L) / L)
    # quarter turns are set exactly so that 1, i, -1, -i carry no rounding
    for k, v in ((0, 1.0), (1, 1j), (2, -1.0), (3, -1j)):
        if (k * L) % 4 == 0:
            r[(k * L) // 4] = v
    r.setflags(write=False)
    return r


def root_of_unity(k, L: int):
    """``exp(2 pi i k / L)`` for integer ``k`` (scalar or array)."""
    return _roots(L)[np.mod(k, L)]


def as_signal(f, L: int | None = None) -> np.ndarray:
    """Validate ``f`` as a finite complex signal, optionally of length ``L``."""
    arr = np.asarray(f, dtype=complex)
    if arr.ndim != 1:
        raise DimensionError(f"signal must be one-dimensional, got shape {arr.shape}")
    if arr.size < 2:
        raise DimensionError("signal length must be at least 2")
    if L is not None and arr.size != L:
        raise DimensionError(f"signal has length {arr.size}, expected {L}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError("signal contains NaN or Inf")
    return arr


def _check_length(L: int) -> int:
    L = int(L)
    if L < 2:
        raise LatticeError(f"length must be at least 2, got {L}")
    return L


def tf_shift(f, p: PointLike) -> np.ndarray:
    """Apply ``pi(p)`` to the signal ``f``."""
    f = as_signal(f)
    L = f.size
    x, w = TFPoint.reduced(p, L)
    t = np.arange(L)
    return root_of_unity(w * t, L) * np.roll(f, x)


def tf_shift_matrix(L: int, p: PointLike) -> np.ndarray:
    """Dense unitary matrix of ``pi(p)`` on C^L."""
    L = _check_length(L)
    x, w = TFPoint.reduced(p, L)
    t = np.arange(L)
    M = np.zeros((L, L), dtype=complex)
    M[t, (t - x) % L] = root_of_unity(w * t, L)
    return M


def composition_phase(p: PointLike, q: PointLike, L: int) -> complex:
    """Phase c with ``pi(p) pi(q) = c * pi(p + q)``."""
    x = int(p[0])
    eta = int(q[1])
    return complex(root_of_unity(-x * eta, L))


def centered_range(n: int) -> np.ndarray:
    """Representatives of Z_n centred at zero: ``-(n//2), ..., n - n//2 - 1``."""
    return np.arange(-(n // 2), n - n // 2)


def symmetric_index(k, n: int):
    """Map residues mod ``n`` to the centred range of :func:`centered_range`."""
    return (np.asarray(k) + n // 2) % n - n // 2


@dataclass(frozen=True)
class LatticeSpec:
    """The separable lattice aZ x bZ inside Z_L x Z_L."""

    L: int
    a: int
    b: int

    def __post_init__(self):
        for name in ("L", "a", "b"):
            v = getattr(self, name)
            if int(v) != v:
                raise LatticeError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.L < 2:
            raise LatticeError(f"L must be at least 2, got {self.L}")
        if self.a < 1 or self.b < 1:
            raise LatticeError(f"lattice steps must be positive, got a={self.a}, b={self.b}")
        if self.L % self.a or self.L % self.b:
            raise LatticeError(f"steps a={self.a}, b={self.b} must divide L={self.L}")

    @property
    def n_time(self) -> int:
        return self.L // self.a

    @property
    def n_freq(self) -> int:
        return self.L // self.b

    @property
    def size(self) -> int:
        return self.n_time * self.n_freq

    @property
    def redundancy(self) -> Fraction:
        return Fraction(self.L, self.a * self.b)

    @property
    def theta(self) -> Fraction:
        """Deformation parameter ab/L of the rotation algebra the lattice generates."""
        return Fraction(self.a * self.b, self.L)

    def points(self) -> np.ndarray:
        """All lattice points as an ``(n_time * n_freq, 2)`` array, time index major."""
        k, l = np.meshgrid(np.arange(self.n_time), np.arange(self.n_freq), indexing="ij")
        return np.stack([self.a * k.ravel(), self.b * l.ravel()], axis=1)

    def point(self, k: int, l: int) -> TFPoint:
        return TFPoint.reduced((self.a * k, self.b * l), self.L)

    def contains(self, p: PointLike) -> bool:
        x, w = TFPoint.reduced(p, self.L)
        return x % self.a == 0 and w % self.b == 0

    def adjoint(self) -> "AdjointLatticeSpec":
        return adjoint_lattice(self)


@dataclass(frozen=True)
class AdjointLatticeSpec(LatticeSpec):
    """Adjoint lattice (L/b)Z x (L/a)Z; itself a lattice in Z_L x Z_L."""

    @property
    def astep(self) -> int:
        return self.a

    @property
    def bstep(self) -> int:
        return self.b


def adjoint_lattice(spec: LatticeSpec) -> AdjointLatticeSpec:
    """Lattice of all shifts commuting with every shift of ``spec``."""
    return AdjointLatticeSpec(spec.L, spec.L // spec.b, spec.L // spec.a)

"""The twisted convolution algebra on Z^2 and its time-frequency representation.

An element is a finitely supported coefficient map ``(k, l) -> a_kl`` with a
deformation parameter ``theta``. It stands for the operator
``sum a_kl pi(a k, b l)`` on a lattice with ``theta = a b / L``. Composing
time-frequency shifts fixes the multiplication::

    (a # b)(m, n) = sum_{k,l} a_kl b_{m-k, n-l} exp(-2 pi i theta k (n - l))

and the involution::

    a*(k, l) = conj(a(-k, -l)) exp(-2 pi i theta k l)

With this sign, ``represent`` is a *-homomorphism and the generators
``U = e_(0,1)``, ``V = e_(1,0)`` satisfy ``U V = exp(2 pi i theta) V U``.

A rational ``theta`` is kept as a :class:`fractions.Fraction` and phases are
looked up from an exact integer exponent; irrational values are plain floats
and can only be used on the coefficient side.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Tuple, Union

import numpy as np

from .errors import (
    IncompatibleAlgebraError,
    ParameterError,
    RepresentationUnavailableError,
    SupportOverflowError,
)
from .gabor import figa_constant
from .report import format_float
from .tf_core import LatticeSpec, adjoint_lattice, as_signal, centered_range, root_of_unity, symmetric_index

Theta = Union[Fraction, float]

PRUNE = 1e-15
SUPPORT_CAP = 512
_CHUNK = 1 << 20


def as_theta(theta) -> Theta:
    if isinstance(theta, Fraction):
        return theta
    if isinstance(theta, np.integer):
        return Fraction(int(theta))
    if isinstance(theta, Rational):
        return Fraction(theta)
    theta = float(theta)
    if not math.isfinite(theta):
        raise ParameterError("theta must be finite")
    return theta


def twist_phase(theta: Theta, m) -> np.ndarray:
    """``exp(2 pi i theta m)`` for integer ``m``."""
    m = np.asarray(m, dtype=np.int64)
    if isinstance(theta, Fraction):
        return root_of_unity(theta.numerator * m, theta.denominator)
    return np.exp(2j * np.pi * np.mod(theta * m, 1.0))


def _join_theta(s: Theta, t: Theta) -> Theta:
    if s != t:
        raise IncompatibleAlgebraError(f"deformation parameters differ: {s} vs {t}")
    return s if isinstance(s, Fraction) else t


@dataclass(frozen=True)
class WeightSpec:
    """Polynomial weight ``(1 + alpha^2 k^2 + beta^2 l^2)^(s/2)``."""

    s: float
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.s < 0:
            raise ParameterError(f"weight exponent must be non-negative, got {self.s}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ParameterError("weight scales must be positive")

    def __call__(self, k, l):
        k = np.asarray(k, dtype=float)
        l = np.asarray(l, dtype=float)
        return (1.0 + (self.alpha * k) ** 2 + (self.beta * l) ** 2) ** (self.s / 2.0)


class TwistedSeq:
    """Finitely supported element of the twisted convolution algebra.

    ``keys`` is an ``(n, 2)`` integer array sorted lexicographically and
    ``values`` the matching complex coefficients. Entries with modulus below
    ``PRUNE`` are dropped on construction. ``alpha`` and ``beta`` are only
    used as default weight scales.
    """

    __slots__ = ("keys", "values", "theta", "alpha", "beta")

    def __init__(self, keys, values, theta, alpha: float = 1.0, beta: float = 1.0, *, prune: float = PRUNE):
        keys = np.asarray(keys, dtype=np.int64).reshape(-1, 2)
        values = np.asarray(values, dtype=complex).reshape(-1)
        if len(keys) != len(values):
            raise ParameterError("keys and values differ in length")
        if len(keys):
            order = np.lexsort((keys[:, 1], keys[:, 0]))
            keys, values = keys[order], values[order]
            new = np.ones(len(keys), dtype=bool)
            new[1:] = np.any(keys[1:] != keys[:-1], axis=1)
            if not new.all():
                starts = np.flatnonzero(new)
                values = np.add.reduceat(values, starts)
                keys = keys[starts]
            keep = np.abs(values) >= prune
            keys, values = keys[keep], values[keep]
        keys.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "theta", as_theta(theta))
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "beta", float(beta))

    def __setattr__(self, name, value):
        raise AttributeError("TwistedSeq is immutable")

    @classmethod
    def from_dict(cls, coeffs: Mapping[Tuple[int, int], complex], theta, alpha=1.0, beta=1.0) -> "TwistedSeq":
        items = list(coeffs.items())
        keys = [k for k, _ in items]
        values = [v for _, v in items]
        return cls(keys, values, theta, alpha, beta)

    @classmethod
    def delta(cls, k: int, l: int, theta, coef: complex = 1.0, alpha=1.0, beta=1.0) -> "TwistedSeq":
        return cls([(k, l)], [coef], theta, alpha, beta)

    @classmethod
    def unit(cls, theta, alpha=1.0, beta=1.0) -> "TwistedSeq":
        return cls.delta(0, 0, theta, 1.0, alpha, beta)

    @classmethod
    def random(cls, rng: np.random.Generator, theta, radius: int = 2, density: float = 1.0, alpha=1.0, beta=1.0):
        """Gaussian coefficients on the box ``|k|, |l| <= radius``."""
        r = np.arange(-radius, radius + 1)
        k, l = np.meshgrid(r, r, indexing="ij")
        keys = np.stack([k.ravel(), l.ravel()], axis=1)
        vals = (rng.standard_normal(len(keys)) + 1j * rng.standard_normal(len(keys))) / np.sqrt(2)
        if density < 1.0:
            vals = vals * (rng.random(len(keys)) < density)
        return cls(keys, vals, theta, alpha, beta)

    def with_values(self, values) -> "TwistedSeq":
        return TwistedSeq(self.keys, values, self.theta, self.alpha, self.beta)

    def to_dict(self) -> dict:
        return {(int(k), int(l)): complex(v) for (k, l), v in zip(self.keys, self.values)}

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, kl) -> complex:
        k, l = kl
        hit = np.flatnonzero((self.keys[:, 0] == k) & (self.keys[:, 1] == l))
        return complex(self.values[hit[0]]) if len(hit) else 0j

    @property
    def radius(self) -> int:
        return int(np.max(np.abs(self.keys))) if len(self.keys) else 0

    def _combine(self, other: "TwistedSeq", sign: float) -> "TwistedSeq":
        theta = _join_theta(self.theta, other.theta)
        keys = np.concatenate([self.keys, other.keys])
        values = np.concatenate([self.values, sign * other.values])
        return TwistedSeq(keys, values, theta, self.alpha, self.beta)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return twisted_product(self, other)

    def norm(self, s: float = 0.0) -> float:
        return weighted_norm(self, WeightSpec(s, self.alpha, self.beta))

    def allclose(self, other: "TwistedSeq", atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol

    def to_json(self) -> str:
        if isinstance(self.theta, Fraction):
            theta = {"p": self.theta.numerator, "q": self.theta.denominator}
        else:
            theta = self.theta
        entries = [[int(k), int(l), float(v.real), float(v.imag)] for (k, l), v in zip(self.keys, self.values)]
        lines = ",\n    ".join(
            f"[{k}, {l}, {format_float(re)}, {format_float(im)}]" for k, l, re, im in entries
        )
        theta_txt = json.dumps(theta) if isinstance(theta, dict) else format_float(theta)
        body = f"\n    {lines}\n  " if entries else ""
        return (
            "{\n"
            f'  "theta": {theta_txt},\n'
            f'  "alpha": {format_float(self.alpha)},\n'
            f'  "beta": {format_float(self.beta)},\n'
            f'  "entries": [{body}]\n'
            "}\n"
        )

    @classmethod
    def from_json(cls, text: str) -> "TwistedSeq":
        d = json.loads(text)
        th = d["theta"]
        theta = Fraction(th["p"], th["q"]) if isinstance(th, dict) else float(th)
        entries = d.get("entries", [])
        keys = [(int(e[0]), int(e[1])) for e in entries]
        values = [complex(e[2], e[3]) for e in entries]
        return cls(keys, values, theta, d.get("alpha", 1.0), d.get("beta", 1.0))

    def __repr__(self):
        return f"TwistedSeq(n={len(self)}, theta={self.theta}, radius={self.radius})"


def twisted_product(a: TwistedSeq, b: TwistedSeq, cap: int = SUPPORT_CAP, prune: float = PRUNE) -> TwistedSeq:
    """Exact twisted convolution ``a # b``, dropping entries below ``prune``.

    Partial products are accumulated per output cell in a fixed order
    (chunks of ``a``'s support, then ``b``'s), so the result does not depend
    on how the work is scheduled.
    """
    theta = _join_theta(a.theta, b.theta)
    if not len(a) or not len(b):
        return TwistedSeq([], [], theta, a.alpha, a.beta)
    if a.radius + b.radius > cap:
        raise SupportOverflowError(f"product support radius {a.radius + b.radius} exceeds cap {cap}")
    lo = a.keys.min(axis=0) + b.keys.min(axis=0)
    hi = a.keys.max(axis=0) + b.keys.max(axis=0)
    width = int(hi[1] - lo[1] + 1)
    size = int((hi[0] - lo[0] + 1) * width)
    re = np.zeros(size)
    im = np.zeros(size)
    step = max(1, _CHUNK // len(b))
    bk, bl = b.keys[:, 0], b.keys[:, 1]
    for start in range(0, len(a), step):
        ak = a.keys[start:start + step, 0][:, None]
        al = a.keys[start:start + step, 1][:, None]
        av = a.values[start:start + step, None]
        terms = av * b.values[None, :] * twist_phase(theta, -ak * bl[None, :])
        idx = (ak + bk[None, :] - lo[0]) * width + (al + bl[None, :] - lo[1])
        idx = idx.ravel()
        terms = terms.ravel()
        re += np.bincount(idx, weights=terms.real, minlength=size)
        im += np.bincount(idx, weights=terms.imag, minlength=size)
    vals = re + 1j * im
    nz = np.flatnonzero(np.abs(vals) >= prune) if prune > 0 else np.flatnonzero(vals != 0)
    keys = np.stack([nz // width + lo[0], nz % width + lo[1]], axis=1)
    return TwistedSeq(keys, vals[nz], theta, a.alpha, a.beta, prune=prune)


def twisted_involution(a: TwistedSeq) -> TwistedSeq:
    k, l = a.keys[:, 0], a.keys[:, 1]
    # entry at (-k, -l) comes from a(k, l); the phase uses the new index (-k)(-l) = k l
    vals = np.conj(a.values) * twist_phase(a.theta, -k * l)
    return TwistedSeq(-a.keys, vals, a.theta, a.alpha, a.beta)


def twisted_power(a: TwistedSeq, n: int, cap: int = SUPPORT_CAP) -> TwistedSeq:
    """``a`` multiplied with itself ``n`` times, by binary exponentiation."""
    if int(n) != n or n < 1:
        raise ParameterError(f"power must be a positive integer, got {n}")
    n = int(n)
    if a.radius * n > cap:
        raise SupportOverflowError(f"support radius {a.radius * n} of a^{n} exceeds cap {cap}")
    result = None
    base = a
    while True:
        if n & 1:
            result = base if result is None else twisted_product(result, base, cap)
        n >>= 1
        if not n:
            return result
        base = twisted_product(base, base, cap)


def weighted_norm(a: TwistedSeq, w: WeightSpec | float = 0.0) -> float:
    """``sum |a_kl| v_s(k, l)``; a bare number is taken as ``s`` with ``a``'s scales."""
    if not isinstance(w, WeightSpec):
        w = WeightSpec(float(w), a.alpha, a.beta)
    if not len(a):
        return 0.0
    return math.fsum(np.abs(a.values) * w(a.keys[:, 0], a.keys[:, 1]))


def fold(a: TwistedSeq, spec: LatticeSpec, prune: float = PRUNE) -> TwistedSeq:
    """Reduce indices to the centred fundamental domain of ``spec``.

    On the lattice ``(a k, b l)`` of Z_L the shifts with ``k`` and
    ``k + L/a`` (or ``l`` and ``l + L/b``) are the same matrix, and the twist
    phase is invariant under those moves, so folding is an algebra map onto
    the finite algebra the representation actually sees.
    """
    keys = np.stack(
        [symmetric_index(a.keys[:, 0], spec.n_time), symmetric_index(a.keys[:, 1], spec.n_freq)], axis=1
    )
    return TwistedSeq(keys, a.values, a.theta, a.alpha, a.beta, prune=prune)


def _require_representable(a: TwistedSeq, spec: LatticeSpec) -> None:
    if isinstance(a.theta, Fraction):
        ok = a.theta == spec.theta
    else:
        ok = abs(a.theta - float(spec.theta)) < 1e-14
    if not ok:
        raise RepresentationUnavailableError(
            f"theta={a.theta} has no matrix model on lattice (L={spec.L}, a={spec.a}, b={spec.b}) "
            f"whose theta is {spec.theta}"
        )


def represent(a: TwistedSeq, spec: LatticeSpec) -> np.ndarray:
    """Dense matrix ``sum a_kl pi(a k, b l)`` on C^L."""
    _require_representable(a, spec)
    L = spec.L
    t = np.arange(L)
    M = np.zeros((L, L), dtype=complex)
    for (k, l), v in zip(a.keys, a.values):
        x = (spec.a * int(k)) % L
        w = (spec.b * int(l)) % L
        M[t, (t - x) % L] += v * root_of_unity(w * t, L)
    return M


def _shift_traces(M: np.ndarray) -> np.ndarray:
    """``T[x, w] = trace(M pi(x, w)^H)`` for all points, via one FFT per shift."""
    L = M.shape[0]
    t = np.arange(L)
    diags = M[t[None, :], (t[None, :] - t[:, None]) % L]
    return np.fft.fft(diags, axis=1)


def coefficients_from_operator(M, spec: LatticeSpec) -> TwistedSeq:
    """Recover ``a`` with ``represent(a, spec) = M`` on the centred fundamental domain.

    Uses the trace pairing ``a_kl = trace(M pi(a k, b l)^H) / L``; exact when
    ``M`` lies in the span of the lattice shifts.
    """
    M = np.asarray(M, dtype=complex)
    L = spec.L
    if M.shape != (L, L):
        raise ParameterError(f"operator has shape {M.shape}, expected {(L, L)}")
    T = _shift_traces(M) / L
    ks = centered_range(spec.n_time)
    ls = centered_range(spec.n_freq)
    kk, ll = np.meshgrid(ks, ls, indexing="ij")
    vals = T[(spec.a * kk) % L, (spec.b * ll) % L]
    keys = np.stack([kk.ravel(), ll.ravel()], axis=1)
    return TwistedSeq(keys, vals.ravel(), spec.theta)


def janssen_coefficients(g, gamma, spec: LatticeSpec):
    """Janssen expansion of the mixed frame operator over the adjoint lattice.

    Returns ``(seq, rebuilt)`` where ``seq`` holds
    ``C <g, pi(mu_kl) gamma>`` for the adjoint points ``mu_kl`` on the
    centred index domain, with ``theta`` of the adjoint lattice, and
    ``rebuilt = sum c_kl pi(mu_kl)``, which equals
    ``frame_operator_matrix(g, gamma, spec)``.
    """
    g = as_signal(g, spec.L)
    gamma = as_signal(gamma, spec.L)
    adj = adjoint_lattice(spec)
    L = spec.L
    # <g, pi(x, w) gamma> = fft(g * conj(roll(gamma, x)))[w]
    x_idx = centered_range(adj.n_time)
    w_idx = centered_range(adj.n_freq)
    C = figa_constant(spec)
    rows = []
    for k in x_idx:
        spectrum = np.fft.fft(g * np.conj(np.roll(gamma, (adj.a * int(k)) % L)))
        rows.append(spectrum[(adj.b * w_idx) % L])
    vals = C * np.array(rows)
    kk, ll = np.meshgrid(x_idx, w_idx, indexing="ij")
    seq = TwistedSeq(np.stack([kk.ravel(), ll.ravel()], axis=1), vals.ravel(), adj.theta, prune=0.0)
    return seq, represent(seq, adj)


DERIVATIONS = ("delta1", "delta2", "laplacian", "potential")


def apply_derivation(a: TwistedSeq, kind: str, s: float = 2.0) -> TwistedSeq:
    """Coefficient multipliers of the derivations and their combinations.

    ``delta1``: ``2 pi i k``; ``delta2``: ``2 pi i l``; ``laplacian``:
    ``-4 pi^2 (k^2 + l^2)``; ``potential``: ``(1 + k^2 + l^2)^(s/2)``, the
    ``s/2`` power of the potential operator.
    """
    k = a.keys[:, 0].astype(float)
    l = a.keys[:, 1].astype(float)
    if kind == "delta1":
        mult = 2j * np.pi * k
    elif kind == "delta2":
        mult = 2j * np.pi * l
    elif kind == "laplacian":
        mult = -4.0 * np.pi**2 * (k**2 + l**2)
    elif kind == "potential":
        if s < 0:
            raise ParameterError("potential power must be non-negative")
        mult = (1.0 + k**2 + l**2) ** (s / 2.0)
    else:
        raise ParameterError(f"unknown derivation {kind!r}; expected one of {DERIVATIONS}")
    return a.with_values(a.values * mult)

"""Window families and the short-time Fourier transform built on them.

The sampled Gaussian lives on the scale ``sigma * sqrt(L)``: for ``sigma = 1``
it is the continuous ``exp(-pi t^2)`` read with ``sqrt(L)`` samples per unit,
so time and frequency spread are balanced on Z_L.

Weights on the time-frequency grid use symmetric representatives
``[-L/2, L/2)`` of each coordinate. The discrete modulation norm carries a
``1/L`` factor; it is a proxy for the continuous norm, not a discretization
with an error bound.

The module also carries the adjoint-lattice summability sums and a
quadrature check of the continuous Gaussian.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ._parallel import pmap
from .algebra import WeightSpec
from .errors import DimensionError, ParameterError
from .tf_core import LatticeSpec, adjoint_lattice, as_signal, centered_range, symmetric_index, tf_shift

WINDOW_KINDS = ("gaussian", "boxcar", "hann", "point_mass")
GAUSSIAN_WRAPS = 6


@dataclass(frozen=True)
class WindowFamily:
    kind: str
    L: int
    sigma: float = 1.0
    width: int | None = None

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise ParameterError(f"unknown window kind {self.kind!r}; expected one of {WINDOW_KINDS}")
        if self.L < 2:
            raise ParameterError(f"L must be at least 2, got {self.L}")
        if self.kind == "gaussian" and not self.sigma > 0:
            raise ParameterError(f"gaussian width sigma must be positive, got {self.sigma}")
        if self.width is not None and not 1 <= self.width <= self.L:
            raise ParameterError(f"window width must lie in [1, L], got {self.width}")


def make_window(fam: WindowFamily) -> np.ndarray:
    """Unit-norm window of the given family."""
    L = fam.L
    t = np.arange(L)
    ts = np.minimum(t, L - t).astype(float)
    if fam.kind == "gaussian":
        scale = fam.sigma * math.sqrt(L)
        js = np.arange(-GAUSSIAN_WRAPS, GAUSSIAN_WRAPS + 1)
        g = np.exp(-np.pi * ((ts[None, :] - js[:, None] * L) / scale) ** 2).sum(axis=0)
    elif fam.kind == "boxcar":
        width = fam.width or max(1, round(math.sqrt(L)))
        g = (t < width).astype(float)
    elif fam.kind == "hann":
        width = fam.width or min(L, 2 * max(1, round(math.sqrt(L))))
        g = np.where(ts <= width / 2, 0.5 * (1 + np.cos(2 * np.pi * ts / width)), 0.0)
    else:
        g = (t == 0).astype(float)
    return (g / np.linalg.norm(g)).astype(complex)


def parse_window(name: str, L: int, sigma: float = 1.0) -> np.ndarray:
    """Window from a short name such as ``gaussian``, ``boxcar2`` or ``hann16``."""
    m = re.fullmatch(r"(gaussian|boxcar|hann|point_mass)(\d*)", name)
    if not m:
        raise ParameterError(f"cannot parse window name {name!r}")
    width = int(m.group(2)) if m.group(2) else None
    return make_window(WindowFamily(m.group(1), L, sigma, width))


def stft(f, g, method: str = "fft", workers: int = 1) -> np.ndarray:
    """``V[x, w] = <f, pi(x, w) g>`` on the full L x L grid.

    ``method="fft"`` computes one length-L DFT per time shift;
    ``method="direct"`` forms every inner product explicitly.
    """
    f = as_signal(f)
    g = as_signal(g)
    if f.size != g.size:
        raise DimensionError(f"signal length {f.size} and window length {g.size} differ")
    L = f.size
    cg = np.conj(g)
    if method == "fft":
        col = lambda x: np.fft.fft(f * np.roll(cg, x))
    elif method == "direct":
        col = lambda x: np.array([np.vdot(tf_shift(g, (x, w)), f) for w in range(L)])
    else:
        raise ParameterError(f"unknown stft method {method!r}")
    return np.array(pmap(col, range(L), workers))


def _grid_weight(L: int, w: WeightSpec) -> np.ndarray:
    c = symmetric_index(np.arange(L), L)
    return w(c[:, None], c[None, :])


def modulation_norm(f, g, w: WeightSpec | float = 0.0) -> float:
    """``(1/L) sum |V_g f(x, w)| v_s(x, w)`` over the whole grid."""
    if not isinstance(w, WeightSpec):
        w = WeightSpec(float(w))
    V = stft(f, g)
    L = V.shape[0]
    return math.fsum((np.abs(V) * _grid_weight(L, w)).ravel()) / L


def condition_a_terms(g, gamma, spec: LatticeSpec, s: float = 0.0):
    """Weighted correlations ``|<gamma, pi(mu) g>| v_s(mu)`` over the adjoint lattice.

    Returns ``(index, terms)``: ``index`` is the ``(N, 2)`` array of centred
    adjoint indices ``(k, l)`` of ``mu = (astep k, bstep l)``, ``terms`` the
    matching non-negative values.
    """
    g = as_signal(g, spec.L)
    gamma = as_signal(gamma, spec.L)
    adj = adjoint_lattice(spec)
    L = spec.L
    weight = WeightSpec(s)
    ks = centered_range(adj.n_time)
    ls = centered_range(adj.n_freq)
    index, terms = [], []
    for k in ks:
        x = adj.a * int(k)
        # <gamma, pi(x, w) g> = fft(gamma * conj(roll(g, x)))[w]
        spectrum = np.fft.fft(gamma * np.conj(np.roll(g, x % L)))
        for l in ls:
            wq = adj.b * int(l)
            v = weight(symmetric_index(x, L), symmetric_index(wq, L))
            index.append((int(k), int(l)))
            terms.append(abs(spectrum[wq % L]) * float(v))
    return np.array(index, dtype=np.int64), np.array(terms)


def condition_a_sum(g, gamma, spec: LatticeSpec, s: float = 0.0) -> float:
    _, terms = condition_a_terms(g, gamma, spec, s)
    return math.fsum(terms)


def gaussian_ambiguity(x: float, w: float) -> complex:
    """``<phi, pi(x, w) phi>`` for the unit-norm Gaussian ``2^(1/4) exp(-pi t^2)``."""
    return complex(np.exp(-1j * np.pi * x * w) * np.exp(-np.pi * (x * x + w * w) / 2))


def ambiguity_quadrature(x: float, w: float, halfwidth: float = 12.0) -> complex:
    """Same inner product by adaptive quadrature of its defining integral.

    The integrand ``phi(t) phi(t - x) exp(-2 pi i w t)`` is split into cosine
    and sine parts handled by QUADPACK's oscillatory rule; the Gaussian
    factor is below 1e-300 outside ``x/2 +- halfwidth``. The result agrees
    with :func:`gaussian_ambiguity` to about 1e-14 on integer points up to 12.
    """
    amp = lambda t: math.sqrt(2.0) * math.exp(-math.pi * (t * t + (t - x) ** 2))
    lo, hi = x / 2 - halfwidth, x / 2 + halfwidth
    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=400)
    if w == 0:
        re_part = integrate.quad(amp, lo, hi, points=[x / 2], **opts)[0]
        return complex(re_part, 0.0)
    omega = 2 * math.pi * w
    re_part = integrate.quad(amp, lo, hi, weight="cos", wvar=omega, **opts)[0]
    im_part = -integrate.quad(amp, lo, hi, weight="sin", wvar=omega, **opts)[0]
    return complex(re_part, im_part)


def continuous_condition_a(kmax: int, alpha: float = 1.0, beta: float = 1.0, method: str = "quadrature") -> float:
    """``sum_{|k|, |l| <= kmax} |<phi, pi(k/beta, l/alpha) phi>|`` for the Gaussian."""
    fn = ambiguity_quadrature if method == "quadrature" else gaussian_ambiguity
    vals = [
        abs(fn(k / beta, l / alpha))
        for k in range(-kmax, kmax + 1)
        for l in range(-kmax, kmax + 1)
    ]
    return math.fsum(vals)

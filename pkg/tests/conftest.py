import numpy as np
import pytest

from gabornct.tf_core import LatticeSpec


def random_signal(rng, L):
    return (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2)


def shift_oracle(f, x, w):
    """pi(x, w) f written out sample by sample."""
    L = len(f)
    return np.array([np.exp(2j * np.pi * w * t / L) * f[(t - x) % L] for t in range(L)])


def frame_operator_oracle(g, gamma, spec: LatticeSpec):
    """sum over the lattice of outer(pi(lambda) g, conj(pi(lambda) gamma))."""
    S = np.zeros((spec.L, spec.L), dtype=complex)
    for k in range(spec.n_time):
        for l in range(spec.n_freq):
            S += np.outer(shift_oracle(g, spec.a * k, spec.b * l), np.conj(shift_oracle(gamma, spec.a * k, spec.b * l)))
    return S


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "SUMMARY", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)

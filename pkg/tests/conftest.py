import numpy as np
import pytest

import gaborfio as gf


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(20250810))


@pytest.fixture(scope="session")
def cfg8():
    return gf.ModelConfig(L=8)


@pytest.fixture(scope="session")
def cfg16():
    return gf.ModelConfig(L=16)


@pytest.fixture(scope="session")
def cfg64():
    return gf.ModelConfig(L=64)


@pytest.fixture(scope="session")
def frame16(cfg16):
    # density 4: a = b = 2 at L = 16
    return gf.build_frame(gf.periodized_gaussian(cfg16), gf.Lattice(2, 2, cfg16))


@pytest.fixture(scope="session")
def frame64(cfg64):
    # density 4: a = b = 4 at L = 64
    return gf.build_frame(gf.periodized_gaussian(cfg64), gf.Lattice(4, 4, cfg64))


def brute_stft(f, g):
    """Definition-level STFT: V[k, m] = sum_n f[n] conj(g[(n-k) mod L]) e^{-2pi i mn/L}."""
    L = len(f)
    V = np.zeros((L, L), complex)
    for k in range(L):
        for m in range(L):
            V[k, m] = sum(f[n] * np.conj(g[(n - k) % L])
                          * np.exp(-2j * np.pi * m * n / L) for n in range(L))
    return V


def brute_shift(f, k, m):
    L = len(f)
    return np.array([np.exp(2j * np.pi * m * n / L) * f[(n - k) % L]
                     for n in range(L)])

"""Shared fixtures: expensive zero sets and profiles are session-scoped."""

from pathlib import Path

import numpy as np
import pytest

import zetamoments as zm

DATA_DIR = Path(__file__).parent / "data"

# First three zero ordinates, frozen from a 30-digit independent
# root-finding oracle (tests/oracles.py regenerates them).
GAMMA_1 = 14.1347251417346937904572519836
GAMMA_2 = 21.0220396387715549926284795939
GAMMA_3 = 25.0108575801456887632137909926


@pytest.fixture(scope="session")
def sieve_10k():
    return zm.build_sieve(10_000)


@pytest.fixture(scope="session")
def zeros_100():
    return zm.find_zeros(100.0)


@pytest.fixture(scope="session")
def zeros_240():
    # first 100+ zeros, for the zeta' cross-validation window
    return zm.find_zeros(240.0)


@pytest.fixture(scope="session")
def zeros_1000():
    return zm.find_zeros(1000.0)


@pytest.fixture(scope="session")
def zeros_5000():
    return zm.find_zeros(5000.0)


@pytest.fixture(scope="session")
def zeros_10000():
    return zm.find_zeros(10_000.0)


@pytest.fixture(scope="session")
def profile_100(zeros_100):
    return zm.zeta_prime_profile(zeros_100)


@pytest.fixture(scope="session")
def profile_1000(zeros_1000):
    return zm.zeta_prime_profile(zeros_1000)


@pytest.fixture(scope="session")
def profile_5000(zeros_5000):
    return zm.zeta_prime_profile(zeros_5000)


@pytest.fixture(scope="session")
def reference_gammas():
    return np.array([float(line) for line in
                     (DATA_DIR / "zeros_reference_1000.txt").read_text().split()])


@pytest.fixture()
def cache_tmp(tmp_path, monkeypatch):
    """Isolated cache directory wired through the environment variable."""
    cache = tmp_path / "zcache"
    monkeypatch.setenv("ZETAMOMENTS_CACHE_DIR", str(cache))
    return cache

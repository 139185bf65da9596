"""Shared fixtures: the three named families and their recursion coefficients."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from momentkit.moments import generate
from momentkit.orthopoly import recursion_coeffs


@pytest.fixture
def hermite():
    return generate('hermite', 12)


@pytest.fixture
def laguerre():
    return generate('laguerre', 12)


@pytest.fixture
def lognormal():
    return generate('lognormal', 20, precision=256)


@pytest.fixture
def hermite_coeffs(hermite):
    return recursion_coeffs(hermite)


@pytest.fixture
def laguerre_coeffs(laguerre):
    return recursion_coeffs(laguerre)

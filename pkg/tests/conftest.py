"""Shared fixtures: independent oracles and prebuilt thermal states."""

import math

import numpy as np
import pytest


def hermite_functions(n_max, xs):
    """Normalized oscillator eigenfunctions psi_0..psi_n_max on a grid.

    Stable two-term recurrence; values stay O(1) for any n.
    """
    out = np.zeros((n_max + 1, xs.size))
    out[0] = np.pi**-0.25 * np.exp(-xs * xs / 2.0)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xs * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xs * out[n] - math.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def overlap_matrix_quadrature(n_max, delta, panels_per_unit=2, order=24):
    """Brute-force |<m|e^{i delta x}|m'>|^2 by panel Gauss-Legendre quadrature.

    Completely independent of the production recurrence: builds the
    wavefunctions on a real-space grid and integrates the oscillatory
    overlap directly.
    """
    half_width = math.sqrt(2.0 * n_max) + 12.0
    panels = int(2 * half_width * panels_per_unit)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-half_width, half_width, panels + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * nodes + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * weights)
    xs = np.concatenate(xs)
    ws = np.concatenate(ws)
    psi = hermite_functions(n_max, xs)
    phase = ws * np.exp(1j * delta * xs)
    amplitude = (psi * phase) @ psi.T
    return np.abs(amplitude) ** 2


@pytest.fixture(scope="session")
def hermite_oracle():
    return overlap_matrix_quadrature


@pytest.fixture(scope="session")
def ensemble_1e4_07():
    from trapscatter import TrapEnsemble

    return TrapEnsemble.at_ratio(10_000, 0.7)


@pytest.fixture(scope="session")
def discrete_1e4_05():
    from trapscatter import solve_mu_discrete, critical_temperature

    return solve_mu_discrete(10_000, 0.5 * critical_temperature(10_000))

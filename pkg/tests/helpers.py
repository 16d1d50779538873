"""Shared constructions for the test suite: parameter pool and random fields."""

import numpy as np

from gdnls import Field, Params

# Validated parameter points spanning interior/endpoint cases, both signs of
# beta, moving and standing frames, and several nonlinearity powers.
PARAM_POOL = [
    Params(1.0, 1.0, 0.0),
    Params(1.0, 1.0, 0.0, 1.0, 0.5),
    Params(1.0, 1.0, 1.0, 1.0, -1.0),
    Params(1.0, 0.25, 1.0, 1.0, -0.5),
    Params(2.0, 1.0, -0.5, 1.0, 0.5),
    Params(2.0, 2.25, 3.0, 1.0, -1.0),
    Params(1.5, 2.0, 1.5, 2.0, -2.0),
    Params(3.0, 1.0, 0.0, 1.0, 1.0),
    Params(1.0, 4.0, -2.0, 1.0, 1.5),
    Params(2.5, 1.0, 1.0, 3.0, 0.0),
]


def band_limited(grid, rng, modes=24, amplitude=1.0):
    """Random periodic field with spectrum confined to |m| <= modes."""
    coef = np.zeros(grid.N, dtype=complex)
    ms = np.arange(-modes, modes + 1)
    taper = np.exp(-2.0 * (ms / modes) ** 2)
    coef[ms] = taper * (rng.standard_normal(ms.size) + 1j * rng.standard_normal(ms.size))
    vals = np.fft.ifft(coef) * grid.N
    vals *= amplitude / np.max(np.abs(vals))
    return Field(grid, vals)


def enveloped(grid, rng, modes=12, width=4.0, amplitude=1.0):
    """Band-limited field times a Gaussian envelope: smooth and strongly decaying."""
    f = band_limited(grid, rng, modes, 1.0)
    vals = f.values * np.exp(-((grid.x / width) ** 2))
    vals = vals * (amplitude / np.max(np.abs(vals)))
    return Field(grid, vals)

"""Periodic grid, field container, and the basic spectral calculus.

Conventions used everywhere downstream: the box is [-L/2, L/2) sampled at
N equispaced nodes x_j = -L/2 + j*dx, wavenumbers are 2*pi*m/L in standard
FFT ordering, the forward transform is unnormalized (numpy default), and
integrals are plain Riemann sums dx * sum(f), which are spectrally accurate
for smooth periodic integrands.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import BadExponents, IncompatibleModulation, NotAdmissible

__all__ = [
    "Grid",
    "Field",
    "Params",
    "validate_params",
    "is_massless",
    "spectral_derivative",
    "quadrature",
    "lp_norm",
    "cumulative_integral",
    "is_grid_compatible",
    "modulate",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L/2, L/2)."""

    L: float
    N: int

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise ValueError(f"box length must be positive, got L={self.L}")
        n = self.N
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 16, got N={n}")

    @cached_property
    def dx(self) -> float:
        return self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.L / 2 + self.dx * np.arange(self.N)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        k = 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)
        k.setflags(write=False)
        return k

    @cached_property
    def k_first(self) -> np.ndarray:
        # Odd-order derivative wavenumbers: the unpaired Nyquist mode is
        # dropped so that derivatives of real fields stay (nearly) real.
        k = self.k.copy()
        k[self.N // 2] = 0.0
        k.setflags(write=False)
        return k


@dataclass(frozen=True)
class Field:
    """Complex-valued samples on a Grid.

    slow_decay marks profiles with algebraic tails; consumers that assume
    exponential boundary decay should only warn, not fail, for such fields.
    """

    grid: Grid
    values: np.ndarray
    slow_decay: bool = False

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "Field":
        return replace(self, values=values)

    def boundary_fraction(self) -> float:
        """max(|f|) at the two outermost nodes relative to the global max."""
        amax = float(np.max(np.abs(self.values)))
        if amax == 0.0:
            return 0.0
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        return float(edge) / amax


@dataclass(frozen=True)
class Params:
    """Wave-speed pair (omega, c), nonlinearity power sigma, virial pair (alpha, beta)."""

    sigma: float
    omega: float
    c: float
    alpha: float = 1.0
    beta: float = 0.0


def is_massless(p: Params) -> bool:
    """Endpoint case omega = c^2/4 (the profile then decays only algebraically)."""
    return p.omega == p.c * p.c / 4


def validate_params(p: Params) -> Params:
    """Check the existence region for (omega, c) and the sign conditions on (alpha, beta).

    Existence requires omega > c^2/4, or omega = c^2/4 with c > 0.  The
    virial pair must satisfy 2*alpha - beta > 0 and 2*alpha + beta > 0,
    together with beta*c <= 0 (interior case) or beta < 0 (endpoint case).
    """
    if not p.sigma >= 1:
        raise ValueError(f"sigma must be >= 1, got {p.sigma}")
    quarter = p.c * p.c / 4
    if p.omega < quarter:
        raise NotAdmissible(f"need omega >= c^2/4: omega={p.omega}, c^2/4={quarter}")
    endpoint = p.omega == quarter
    if endpoint and not p.c > 0:
        raise NotAdmissible(f"endpoint omega = c^2/4 requires c > 0, got c={p.c}")
    if not 2 * p.alpha - p.beta > 0:
        raise BadExponents(f"need 2*alpha - beta > 0: alpha={p.alpha}, beta={p.beta}")
    if not 2 * p.alpha + p.beta > 0:
        raise BadExponents(f"need 2*alpha + beta > 0: alpha={p.alpha}, beta={p.beta}")
    if endpoint:
        if not p.beta < 0:
            raise BadExponents(f"endpoint case requires beta < 0, got beta={p.beta}")
    elif p.beta * p.c > 0:
        raise BadExponents(f"need beta*c <= 0: beta={p.beta}, c={p.c}")
    return p


def spectral_derivative(f: Field) -> Field:
    """d/dx via FFT, exact for band-limited fields."""
    vhat = np.fft.fft(f.values)
    return f.with_values(np.fft.ifft(1j * f.grid.k_first * vhat))


def quadrature(f: Field) -> float:
    """Riemann-sum integral of the real part over the box."""
    return f.grid.dx * float(np.sum(f.values.real))


def lp_norm(f: Field, p: float) -> float:
    """L^p norm by quadrature; p = inf is the grid maximum of |f|."""
    a = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(a))
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return float((f.grid.dx * np.sum(a**p)) ** (1.0 / p))


def cumulative_integral(f: Field) -> Field:
    """Antiderivative F(x) = int_0^x f, with F(0) = 0 at the central node.

    The mean-free part is inverted spectrally; the mean contributes a linear
    term m*x which is exact but not periodic, so downstream spectral
    derivatives of F are only meaningful when f has zero mean.
    """
    g = f.grid
    v = f.values.real
    m = float(np.mean(v))
    vhat = np.fft.fft(v - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        ghat = np.where(g.k_first != 0, vhat / (1j * g.k_first), 0.0)
    ghat[0] = 0.0
    G = np.fft.ifft(ghat).real
    # x = 0 sits at node N/2 because N is even.
    F = G - G[g.N // 2] + m * g.x
    return f.with_values(F)


def is_grid_compatible(grid: Grid, c: float, tol: float = 1e-9) -> bool:
    """True when exp(i*c*x/2) is periodic on the box, i.e. c*L/(4*pi) is an integer."""
    r = c * grid.L / (4 * np.pi)
    return abs(r - round(r)) <= tol


def modulate(f: Field, c: float) -> Field:
    """Multiply by the plane wave exp(i*c*x/2).

    Refuses speeds whose half-wave is not periodic on the box, since sampling
    a non-periodic factor silently corrupts every spectral operation after it.
    """
    if not is_grid_compatible(f.grid, c):
        raise IncompatibleModulation(
            f"c={c} is not a multiple of 4*pi/L={4 * np.pi / f.grid.L:.6g}"
        )
    return f.with_values(f.values * np.exp(0.5j * c * f.grid.x))


def save_field(f: Field, path: str, t: float | None = None) -> None:
    """Write a field as JSON: {L, N, re, im} plus an optional timestamp."""
    doc = {
        "L": f.grid.L,
        "N": f.grid.N,
        "re": f.values.real.tolist(),
        "im": f.values.imag.tolist(),
    }
    if t is not None:
        doc["t"] = t
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_field(path: str) -> Field:
    with open(path) as fh:
        doc = json.load(fh)
    grid = Grid(float(doc["L"]), int(doc["N"]))
    values = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    return Field(grid, values)

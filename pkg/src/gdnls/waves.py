"""Exact solitary-wave profiles, their defining equations, and scalar diagnostics.

The amplitude solves the profile equation

    -Phi'' + (omega - c^2/4) Phi + (c/2) Phi^(2s+1) - (2s+1)/(2s+2)^2 Phi^(4s+1) = 0

(s = sigma), with two branches: a cosh-based profile for omega > c^2/4 and an
algebraically decaying one at the endpoint omega = c^2/4, c > 0.  The full
complex wave attaches the phase c*x/2 - (2s+2)^{-1} * int_0^x Phi^(2s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .core import Field, Grid, Params, cumulative_integral
from .errors import BoundaryProximity, NoBracket, NotAdmissible, QuadratureFailure, SigmaUnsupported

__all__ = [
    "SolitonSpec",
    "profile_Phi",
    "profile_phi",
    "traveling_wave",
    "elliptic_residual",
    "first_integral_residual",
    "ClosedFormInvariants",
    "closed_form_invariants",
    "F_sigma",
    "z0_root",
]

# Boundary-decay thresholds for the two branches.  The endpoint profile only
# decays like |x|^(-1/sigma), so it gets a much looser warning level.
_EDGE_TOL = 1e-10
_EDGE_TOL_SLOW = 1e-6


@dataclass(frozen=True)
class SolitonSpec:
    """A single solitary wave: speeds, nonlinearity power, center, global phase."""

    sigma: float
    omega: float
    c: float
    x0: float = 0.0
    theta0: float = 0.0

    def __post_init__(self) -> None:
        if not self.sigma >= 1:
            raise ValueError(f"sigma must be >= 1, got {self.sigma}")
        quarter = self.c * self.c / 4
        if self.omega < quarter:
            raise NotAdmissible(f"need omega >= c^2/4: omega={self.omega}, c={self.c}")
        if self.omega == quarter and not self.c > 0:
            raise NotAdmissible(f"endpoint omega = c^2/4 requires c > 0, got c={self.c}")
        object.__setattr__(self, "theta0", self.theta0 % (2 * math.pi))

    @property
    def massless(self) -> bool:
        return self.omega == self.c * self.c / 4


def _amplitude_power(spec: SolitonSpec, y: np.ndarray) -> np.ndarray:
    """Phi(y)^(2*sigma) for the centered profile, vectorized in y."""
    s, w, c = spec.sigma, spec.omega, spec.c
    if spec.massless:
        return 2 * (s + 1) * c / ((s * c * y) ** 2 + 1)
    root = math.sqrt(4 * w - c * c)
    with np.errstate(over="ignore"):
        den = 2 * math.sqrt(w) * np.cosh(s * root * y) - c
    out = np.where(np.isfinite(den), (s + 1) * (4 * w - c * c) / den, 0.0)
    return out


def _amplitude(spec: SolitonSpec, y: np.ndarray) -> np.ndarray:
    return _amplitude_power(spec, y) ** (1.0 / (2 * spec.sigma))


def _warn_edge(f: Field, what: str) -> None:
    tol = _EDGE_TOL_SLOW if f.slow_decay else _EDGE_TOL
    frac = f.boundary_fraction()
    if frac > tol:
        warnings.warn(
            f"{what}: boundary magnitude {frac:.2e} of max exceeds {tol:.0e}; "
            "enlarge the box",
            BoundaryProximity,
            stacklevel=3,
        )


def profile_Phi(spec: SolitonSpec, grid: Grid) -> Field:
    """Real positive amplitude Phi, translated by x0."""
    vals = _amplitude(spec, grid.x - spec.x0)
    f = Field(grid, vals, slow_decay=spec.massless)
    _warn_edge(f, "profile_Phi")
    return f


def _sampled_wave(spec: SolitonSpec, grid: Grid, shift: float, phase0: float) -> Field:
    """Phi(x - shift) * exp(i*(c/2)(x - shift) - i*I(x - shift)/(2s+2) + i*phase0).

    I(z) = int_0^z Phi^(2*sigma).  The grid carries int_0^x of the shifted
    amplitude; the remaining constant I(-shift) is a scalar 1-D quadrature of
    the closed form, so off-grid shifts lose no accuracy.
    """
    y = grid.x - shift
    amp = _amplitude(spec, y)
    pw = Field(grid, _amplitude_power(spec, y), slow_decay=spec.massless)
    run = cumulative_integral(pw).values.real
    if shift != 0.0:
        off, err = quad(lambda t: float(_amplitude_power(spec, np.asarray(t))), 0.0, -shift)
        if not math.isfinite(off) or err > 1e-9 * (1 + abs(off)):
            raise QuadratureFailure(f"phase offset integral failed: value={off}, err={err}")
    else:
        off = 0.0
    phase = 0.5 * spec.c * y - (run + off) / (2 * spec.sigma + 2) + phase0
    f = Field(grid, amp * np.exp(1j * phase), slow_decay=spec.massless)
    _warn_edge(f, "profile")
    return f


def profile_phi(spec: SolitonSpec, grid: Grid) -> Field:
    """The full complex standing profile, including translation and global phase."""
    return _sampled_wave(spec, grid, spec.x0, spec.theta0)


def traveling_wave(spec: SolitonSpec, grid: Grid, t: float) -> Field:
    """Exact solution at time t: phase rotation at rate omega riding at speed c."""
    return _sampled_wave(spec, grid, spec.x0 + spec.c * t, spec.theta0 + spec.omega * t)


def _second_derivative(f: Field) -> np.ndarray:
    return np.fft.ifft(-f.grid.k**2 * np.fft.fft(f.values))


def elliptic_residual(Phi: Field, p: Params) -> float:
    """L^2 norm of the profile-equation residual at the given parameters."""
    s = p.sigma
    a = Phi.values
    absa = np.abs(a)
    r = (
        -_second_derivative(Phi)
        + (p.omega - p.c * p.c / 4) * a
        + 0.5 * p.c * absa ** (2 * s) * a
        - (2 * s + 1) / (2 * s + 2) ** 2 * absa ** (4 * s) * a
    )
    return float(np.sqrt(Phi.grid.dx * np.sum(np.abs(r) ** 2)))


def first_integral_residual(Phi: Field, p: Params) -> float:
    """Sup norm of the first integral of the profile equation.

    Multiplying the profile equation by Phi' and integrating once (decay fixes
    the constant at zero) gives, pointwise,

        -(Phi')^2/2 + (omega - c^2/4) Phi^2 / 2
            + c Phi^(2s+2) / (4s+4) - Phi^(4s+2) / (2*(2s+2)^2) = 0,

    where the last coefficient uses (2s+1)/(4s+2) = 1/2.
    """
    s = p.sigma
    g = Phi.grid
    a = Phi.values.real
    da = np.fft.ifft(1j * g.k_first * np.fft.fft(a)).real
    G = (
        -0.5 * da**2
        + 0.5 * (p.omega - p.c * p.c / 4) * a**2
        + p.c / (4 * s + 4) * np.abs(a) ** (2 * s + 2)
        - 0.5 / (2 * s + 2) ** 2 * np.abs(a) ** (4 * s + 2)
    )
    return float(np.max(np.abs(G)))


class ClosedFormInvariants(NamedTuple):
    mass: float
    momentum: float
    energy: float
    action: float


def closed_form_invariants(omega: float, c: float, sigma: float = 1.0) -> ClosedFormInvariants:
    """Exact mass/momentum/energy/action of the solitary wave (sigma = 1 only)."""
    if sigma != 1.0:
        raise SigmaUnsupported(f"closed forms only available for sigma = 1, got {sigma}")
    quarter = c * c / 4
    if omega < quarter or (omega == quarter and not c > 0):
        raise NotAdmissible(f"omega={omega}, c={c} outside the existence region")
    if omega == quarter:
        mass = 4 * math.pi
        momentum = 0.0
        energy = 0.0
    else:
        s2 = 2 * math.sqrt(omega)
        root = math.sqrt(4 * omega - c * c)
        mass = 8 * math.atan(math.sqrt((s2 + c) / (s2 - c)))
        momentum = 2 * root
        energy = -0.5 * c * root
    action = energy + 0.5 * omega * mass + 0.5 * c * momentum
    return ClosedFormInvariants(mass, momentum, energy, action)


def _fsigma_cutoff(sigma: float, tol: float) -> float:
    # Tail of both integrands is <= const * exp(-y/sigma); solve for the cutoff
    # that pushes the truncated mass below tol with a wide safety factor.
    return sigma * math.log(400 * (4 ** (1 / sigma)) * max(sigma, 1.0) / tol) + 5.0


def F_sigma(z: float, sigma: float, tol: float = 1e-12) -> float:
    """Sign detector for the stability character of the endpoint wave family.

    F(z) = (sigma-1)^2 * I1(z)^2 - I2(z)^2 with

        I1 = int_0^inf (cosh y - z)^(-1/sigma) dy,
        I2 = int_0^inf (cosh y - z)^(-1/sigma - 1) * (z cosh y - 1) dy,

    evaluated by adaptive quadrature on [0, Y] with Y chosen so the dropped
    tail is below tol.  For sigma = 1 the first term vanishes and I2 = -1
    exactly (the integrand is the derivative of -sinh y / (cosh y - z)).
    """
    if not -1 < z < 1:
        raise ValueError(f"z must lie in (-1, 1), got {z}")
    if not 1 <= sigma <= 2:
        raise ValueError(f"sigma must lie in [1, 2], got {sigma}")
    Y = _fsigma_cutoff(sigma, tol)
    inv = 1.0 / sigma

    def f1(y: float) -> float:
        return (math.cosh(y) - z) ** (-inv)

    def f2(y: float) -> float:
        ch = math.cosh(y)
        return (ch - z) ** (-inv - 1) * (z * ch - 1)

    vals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for f in (f1, f2):
            v, _ = quad(f, 0.0, Y, epsabs=tol, epsrel=100 * tol, limit=500)
            vals.append(v)
    i1, i2 = vals
    out = (sigma - 1) ** 2 * i1 * i1 - i2 * i2
    if not math.isfinite(out):
        raise QuadratureFailure(f"F_sigma({z}, {sigma}) did not evaluate to a finite value")
    return out


def z0_root(sigma: float, z_tol: float = 1e-8, quad_tol: float = 1e-12) -> float:
    """Unique zero of F_sigma on (-1, 1), located by a bracket scan plus bisection."""
    if not 1 < sigma < 2:
        raise ValueError(f"z0_root requires 1 < sigma < 2, got {sigma}")
    eps = 1e-3
    zs = np.linspace(-1 + eps, 1 - eps, 41)
    fs = [F_sigma(float(z), sigma, quad_tol) for z in zs]
    lo = hi = None
    for i in range(len(zs) - 1):
        if fs[i] == 0.0:
            return float(zs[i])
        if fs[i] * fs[i + 1] < 0:
            lo, hi, flo = float(zs[i]), float(zs[i + 1]), fs[i]
            break
    if lo is None:
        raise NoBracket(f"no sign change of F_sigma on [{zs[0]:.3f}, {zs[-1]:.3f}]")
    while hi - lo > z_tol:
        mid = 0.5 * (lo + hi)
        fm = F_sigma(mid, sigma, quad_tol)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)

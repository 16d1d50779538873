"""Conserved quantities, action/virial functionals, and sharp-constant checks.

Sign conventions: with N(u) = Re int i |u|^(2s) conj(u) u_x,

    E(u) = ||u_x||^2 / 2 - N(u)/(2s+2),   M(u) = ||u||^2,   P(u) = Re int i u_x conj(u),

and the action at speeds (omega, c) is S = E + (omega/2) M + (c/2) P.  The
"tilde" family evaluates the same objects after removing the plane-wave factor
exp(i c x / 2); all shifted quantities below use the operator d/dx - i c/2
directly so no modulation is ever sampled on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Field, Params, cumulative_integral
from .errors import ZeroField

__all__ = [
    "mass",
    "momentum",
    "nonlinear_N",
    "energy",
    "action_S",
    "virial_K",
    "I_functional",
    "TildeValues",
    "tilde_functionals",
    "IdentityReport",
    "identity_suite",
    "FunctionalReport",
    "functional_report",
    "gauge_to_w",
    "gauge_from_w",
    "calE",
    "calP",
    "gw_momentum_floor",
    "agmon_ratio",
    "gn1_ratio",
    "gn2_ratio",
    "GNReport",
    "gn_checks",
]


def _deriv(u: Field) -> np.ndarray:
    return np.fft.ifft(1j * u.grid.k_first * np.fft.fft(u.values))


def _l2sq(u: Field, v: np.ndarray) -> float:
    return u.grid.dx * float(np.sum(np.abs(v) ** 2))


def _lpp(u: Field, p: float) -> float:
    """||u||_p^p (the integral itself, no root)."""
    return u.grid.dx * float(np.sum(np.abs(u.values) ** p))


def mass(u: Field) -> float:
    return _l2sq(u, u.values)


def momentum(u: Field) -> float:
    du = _deriv(u)
    return u.grid.dx * float(np.sum((1j * du * np.conj(u.values)).real))


def nonlinear_N(u: Field, sigma: float) -> float:
    du = _deriv(u)
    integrand = 1j * np.abs(u.values) ** (2 * sigma) * np.conj(u.values) * du
    return u.grid.dx * float(np.sum(integrand.real))


def energy(u: Field, sigma: float) -> float:
    return 0.5 * _l2sq(u, _deriv(u)) - nonlinear_N(u, sigma) / (2 * sigma + 2)


def action_S(u: Field, p: Params) -> float:
    return energy(u, p.sigma) + 0.5 * p.omega * mass(u) + 0.5 * p.c * momentum(u)


def virial_K(u: Field, p: Params) -> float:
    """Scaling derivative of the action along e^(a*l) u(e^(-b*l) x) at l = 0."""
    a, b, s = p.alpha, p.beta, p.sigma
    grad_sq = _l2sq(u, _deriv(u))
    return (
        0.5 * (2 * a - b) * grad_sq
        + (0.5 * (2 * a + b) * p.omega - 0.25 * p.c**2 * b) * mass(u)
        + 0.5 * (2 * a - b) * p.c * momentum(u)
        + b * p.c / (2 * (2 * s + 2)) * _lpp(u, 2 * s + 2)
        - a * nonlinear_N(u, s)
    )


def I_functional(u: Field, p: Params) -> float:
    """Companion virial form without the L^(2s+2) term; equals virial_K when beta = 0."""
    a, b = p.alpha, p.beta
    return (
        0.5 * (2 * a - b) * _l2sq(u, _deriv(u))
        + 0.5 * (2 * a + b) * p.omega * mass(u)
        + p.c * a * momentum(u)
        - a * nonlinear_N(u, p.sigma)
    )


class TildeValues(NamedTuple):
    action: float
    virial: float
    residue: float  # the positive-coefficient remainder J


def tilde_functionals(psi: Field, p: Params) -> TildeValues:
    """Action, virial, and remainder in the frame with the c-modulation removed."""
    a, b, s = p.alpha, p.beta, p.sigma
    w = p.omega - p.c**2 / 4
    grad_sq = _l2sq(psi, _deriv(psi))
    m = mass(psi)
    pot = _lpp(psi, 2 * s + 2)
    n = nonlinear_N(psi, s)
    act = 0.5 * grad_sq + 0.5 * w * m + p.c / (2 * (2 * s + 2)) * pot - n / (2 * s + 2)
    vir = (
        0.5 * (2 * a - b) * grad_sq
        + 0.5 * (2 * a + b) * w * m
        + ((2 * s + 2) * a + b) * p.c / (2 * (2 * s + 2)) * pot
        - a * n
    )
    res = 0.5 * (2 * s * a + b) * grad_sq + 0.5 * (2 * s * a - b) * w * m - b * p.c / (
        2 * (2 * s + 2)
    ) * pot
    return TildeValues(act, vir, res)


@dataclass(frozen=True)
class IdentityReport:
    """Absolute residuals of the structural identities, with per-identity scales.

    A residual passes at tolerance tol when residual <= tol * scale; the scale
    is the sum of magnitudes of the terms entering the identity, so the check
    is meaningful across wildly different field amplitudes.
    """

    residuals: dict[str, float]
    scales: dict[str, float]

    def max_relative(self) -> float:
        return max(
            r / s if s > 0 else 0.0
            for r, s in ((self.residuals[k], self.scales[k]) for k in self.residuals)
        )

    def ok(self, tol: float = 1e-9) -> bool:
        return self.max_relative() <= tol


def identity_suite(u: Field, p: Params) -> IdentityReport:
    """Cross-check the shift identities and both action decompositions on one field."""
    a, b, s = p.alpha, p.beta, p.sigma
    c = p.c
    w = p.omega - c * c / 4
    du = _deriv(u)
    shifted = du - 0.5j * c * u.values
    grad_sq = _l2sq(u, du)
    shift_sq = _l2sq(u, shifted)
    m = mass(u)
    mom = momentum(u)
    pot = _lpp(u, 2 * s + 2)
    quart = _lpp(u, 4 * s + 2)
    n = nonlinear_N(u, s)
    n_shift = u.grid.dx * float(
        np.sum((1j * np.abs(u.values) ** (2 * s) * np.conj(u.values) * shifted).real)
    )

    residuals: dict[str, float] = {}
    scales: dict[str, float] = {}

    # Momentum under modulation removal.
    lhs = c * mom
    rhs = -grad_sq - 0.25 * c * c * m + shift_sq
    residuals["momentum_shift"] = abs(lhs - rhs)
    scales["momentum_shift"] = abs(lhs) + grad_sq + 0.25 * c * c * m + shift_sq

    # Nonlinear term under modulation removal.
    lhs = n
    rhs = -0.5 * c * pot + n_shift
    residuals["nonlinear_shift"] = abs(lhs - rhs)
    scales["nonlinear_shift"] = abs(n) + 0.5 * abs(c) * pot + abs(n_shift)

    # Completed square hiding inside -N.
    half_current = _l2sq(u, du + 0.5j * np.abs(u.values) ** (2 * s) * u.values)
    lhs = -n
    rhs = -grad_sq - 0.25 * quart + half_current
    residuals["nonlinear_decomposition"] = abs(lhs - rhs)
    scales["nonlinear_decomposition"] = abs(n) + grad_sq + 0.25 * quart + half_current

    # Action split in the modulation-removed frame (field read as psi).
    act, vir, res = tilde_functionals(u, p)
    lhs = a * (2 * s + 2) * act
    rhs = vir + res
    residuals["action_split_tilde"] = abs(lhs - rhs)
    scales["action_split_tilde"] = abs(lhs) + abs(vir) + abs(res)

    # Action split in the laboratory frame.
    lhs = a * (2 * s + 2) * action_S(u, p)
    rhs = (
        virial_K(u, p)
        + 0.5 * (2 * s * a + b) * shift_sq
        + 0.5 * (2 * s * a - b) * w * m
        - b * c / (2 * (2 * s + 2)) * pot
    )
    residuals["action_split"] = abs(lhs - rhs)
    scales["action_split"] = (
        abs(lhs)
        + abs(virial_K(u, p))
        + 0.5 * abs(2 * s * a + b) * shift_sq
        + 0.5 * abs(2 * s * a - b) * abs(w) * m
        + abs(b * c) / (2 * (2 * s + 2)) * pot
    )

    return IdentityReport(residuals, scales)


@dataclass(frozen=True)
class FunctionalReport:
    mass: float
    momentum: float
    energy: float
    nonlinear: float
    action: float
    virial: float
    i_virial: float
    tilde: TildeValues


def functional_report(u: Field, p: Params) -> FunctionalReport:
    """Everything at once, for dashboards and manifests."""
    return FunctionalReport(
        mass=mass(u),
        momentum=momentum(u),
        energy=energy(u, p.sigma),
        nonlinear=nonlinear_N(u, p.sigma),
        action=action_S(u, p),
        virial=virial_K(u, p),
        i_virial=I_functional(u, p),
        tilde=tilde_functionals(u, p),
    )


# ---------------------------------------------------------------------------
# The cubic-case (sigma = 1) gauge frame.


def _gauge_phase(u: Field) -> np.ndarray:
    """(1/4) int_{left edge}^{x} |u|^2, the left box edge standing in for -infinity."""
    run = cumulative_integral(Field(u.grid, np.abs(u.values) ** 2)).values.real
    return 0.25 * (run - run[0])


def gauge_to_w(u: Field) -> Field:
    """Divide out the derivative-coupling phase (sigma = 1); |w| = |u|."""
    return u.with_values(u.values * np.exp(1j * _gauge_phase(u)))


def gauge_from_w(w: Field) -> Field:
    """Inverse of gauge_to_w; exact round trip since |w| determines the phase."""
    return w.with_values(w.values * np.exp(-1j * _gauge_phase(w)))


def calE(w: Field) -> float:
    """Energy seen in the gauge frame: ||w_x||^2/2 - ||w||_6^6/32."""
    return 0.5 * _l2sq(w, _deriv(w)) - _lpp(w, 6.0) / 32.0


def calP(w: Field) -> float:
    """Momentum seen in the gauge frame: Re int i w_x conj(w) + ||w||_4^4/4."""
    return momentum(w) + 0.25 * _lpp(w, 4.0)


def gw_momentum_floor(w: Field) -> float:
    """Lower bound for calP(w) in terms of calE and the L^2/L^4 norms (sigma = 1)."""
    l4 = _lpp(w, 4.0)
    if l4 == 0.0:
        raise ZeroField("momentum floor undefined for the zero field")
    l2 = math.sqrt(mass(w))
    rp = math.sqrt(math.pi)
    return 0.25 * l4 * (1 - l2 / (2 * rp)) - 8 * rp * calE(w) * l2 / l4


# ---------------------------------------------------------------------------
# Sharp-constant interpolation inequality ratios (== 1 exactly at optimizers).


def _nonzero(f: Field) -> None:
    if not np.any(f.values):
        raise ZeroField("ratio undefined for the zero field")


def agmon_ratio(f: Field, p: float = 1.0) -> float:
    """||f||_inf^(2p) over 2p ||f||_(4p-2)^(2p-1) ||f_x||_2; at most 1 for decaying fields."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    _nonzero(f)
    sup = float(np.max(np.abs(f.values)))
    lq = _lpp(f, 4 * p - 2) ** (1.0 / (4 * p - 2))
    grad = math.sqrt(_l2sq(f, _deriv(f)))
    return sup ** (2 * p) / (2 * p * lq ** (2 * p - 1) * grad)


def gn1_ratio(f: Field) -> float:
    """||f||_6^6 over (4/pi^2) ||f||_2^4 ||f_x||_2^2; equality at the c = 0 wave."""
    _nonzero(f)
    return _lpp(f, 6.0) / (4 / math.pi**2 * mass(f) ** 2 * _l2sq(f, _deriv(f)))


def gn2_ratio(f: Field) -> float:
    """||f||_6^6 over 3 (2pi)^(-2/3) ||f||_4^(16/3) ||f_x||_2^(2/3); equality at the endpoint wave."""
    _nonzero(f)
    denom = (
        3
        * (2 * math.pi) ** (-2 / 3)
        * _lpp(f, 4.0) ** (4 / 3)
        * _l2sq(f, _deriv(f)) ** (1 / 3)
    )
    return _lpp(f, 6.0) / denom


class GNReport(NamedTuple):
    agmon: float
    gn1: float
    gn2: float


def gn_checks(f: Field, p: float = 1.0) -> GNReport:
    return GNReport(agmon_ratio(f, p), gn1_ratio(f), gn2_ratio(f))

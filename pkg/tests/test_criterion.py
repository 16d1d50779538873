"""Membership classification, the certificate search over admissible speeds,
and the borderline-mass gradient bound.  The pinned speeds below were frozen
from deterministic runs of the same constructions; they only move if the scan
lattice or the data recipes change.
"""

import math

import numpy as np
import pytest

from gdnls import (
    Certificate,
    Field,
    Grid,
    Inapplicable,
    NotFound,
    Params,
    SearchConfig,
    SolitonSpec,
    ZeroField,
    action_S,
    certify_global,
    corollary15_data,
    energy,
    guo_wu_bound,
    guo_wu_bound_values,
    is_grid_compatible,
    mass,
    membership,
    momentum,
    profile_phi,
    tilde_functionals,
)


def _gaussian_with_mass(g, mass_pi, boost=0.0):
    vals = np.exp(-(g.x**2)).astype(complex)
    if boost:
        vals = vals * np.exp(1j * boost * g.x)
    u = Field(g, vals)
    return u.with_values(u.values * math.sqrt(mass_pi * math.pi / mass(u)))


def test_membership_of_scaled_waves():
    g = Grid(60.0, 2048)
    p = Params(1.0, 1.0, 0.0)
    phi = profile_phi(SolitonSpec(1.0, 1.0, 0.0), g)

    at = membership(phi, p)
    # the wave sits exactly on the corner S = mu, K = 0; which kind the
    # exact comparisons pick is a roundoff accident, but the numbers are not
    assert abs(at.action - at.level) < 1e-8
    assert abs(at.virial) < 1e-8

    small = membership(phi.with_values(0.8 * phi.values), p)
    assert small.kind == "KPlus"
    assert small.virial > 0 and small.action < small.level

    big = membership(phi.with_values(1.2 * phi.values), p)
    assert big.kind == "KMinus"
    assert big.virial < 0 and big.action < big.level

    fat = Field(g, 2.0 * np.exp(-((g.x / 6.0) ** 2)).astype(complex))
    out = membership(fat, p)
    assert out.kind == "Neither"
    assert out.action > out.level


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(sigma=0.5)
    with pytest.raises(ValueError):
        SearchConfig(c_min=0.0)
    with pytest.raises(ValueError):
        SearchConfig(c_min=2.0, c_max=1.0)
    with pytest.raises(ValueError):
        SearchConfig(points=1)
    with pytest.raises(ValueError):
        SearchConfig(strategies=("modulation",))
    with pytest.raises(ValueError):
        SearchConfig(strategy_hint="whatever")


def test_certify_rejects_degenerate_data():
    g = Grid(60.0, 64)
    with pytest.raises(ZeroField):
        certify_global(Field(g, np.zeros(64)), SearchConfig())
    bad = np.zeros(64, complex)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        certify_global(Field(g, bad), SearchConfig())


def test_certify_small_mass_scans_through():
    """Mass 3.9 pi sits under the borderline, so some endpoint speed accepts."""
    g = Grid(60.0, 1024)
    u = _gaussian_with_mass(g, 3.9)
    res = certify_global(u, SearchConfig(sigma=1.0))
    assert isinstance(res, Certificate)
    assert res.strategy == "massless-scan"
    assert res.action <= res.level and res.virial >= 0
    # accepted speed lies on the box lattice 4 pi m / L
    m = res.params.c * g.L / (4 * math.pi)
    assert abs(m - round(m)) < 1e-9
    assert res.params.c == pytest.approx(14.451326206513048, rel=1e-9)
    assert membership(u, res.params).kind == "KPlus"


def test_certify_borderline_mass_with_negative_momentum():
    g = Grid(60.0, 1024)
    q = 2 * math.pi * 5 / 60.0
    u = _gaussian_with_mass(g, 4.0, boost=q)
    assert momentum(u) < 0
    res = certify_global(u, SearchConfig(sigma=1.0))
    assert isinstance(res, Certificate)
    assert res.strategy == "negative-momentum"
    assert res.params.c == pytest.approx(7.120943348136864, rel=1e-9)
    assert membership(u, res.params).kind == "KPlus"


def test_certify_modulated_profile_route():
    """Plane-wave dressed data e^{icx/2}psi at large speed: the certificate
    appears once the level (growing like c^(1+1/sigma)) overtakes the action
    (growing like c^2 times a small mass)."""
    g = Grid(20 * math.pi, 1024)
    psi = Field(g, (1.2 * np.exp(-(g.x**2) / 4)).astype(complex))
    cstar = 12.8
    assert is_grid_compatible(g, cstar)
    u = corollary15_data(psi, cstar)
    # same-speed consistency: the lab action of the dressed data equals the
    # shifted action of the bare envelope
    p_star = Params(2.0, cstar**2 / 4, cstar, 1.0, -0.5)
    assert action_S(u, p_star) == pytest.approx(
        tilde_functionals(psi, p_star).action, rel=1e-12
    )
    res = certify_global(u, SearchConfig(sigma=2.0, strategy_hint="modulation"))
    assert isinstance(res, Certificate)
    assert res.strategy == "modulation"
    assert res.params.c == pytest.approx(6.0, rel=1e-9)
    assert membership(u, res.params).kind == "KPlus"


def test_certify_not_found_keeps_best_margin():
    g = Grid(60.0, 1024)
    cw = 4 * math.pi * 10 / 60.0
    with pytest.warns(UserWarning):
        phi = profile_phi(SolitonSpec(1.0, cw * cw / 4, cw), g)
    u = phi.with_values(1.05 * phi.values)  # 10 percent over critical mass
    res = certify_global(u, SearchConfig(sigma=1.0, strategies=("massless-scan",)))
    assert isinstance(res, NotFound)
    assert res.tried == 40
    assert res.params is not None
    assert res.margin > 0
    assert res.margin == pytest.approx(0.3459, abs=2e-2)


def test_guo_wu_bound_on_boosted_gaussian():
    g = Grid(60.0, 1024)
    q = 2 * math.pi * 5 / 60.0
    u = _gaussian_with_mass(g, 4.0, boost=q)
    E, M, P = energy(u, 1.0), mass(u), momentum(u)
    X, bound = guo_wu_bound_values(E, M, P)
    assert X == pytest.approx(8 * math.sqrt(math.pi) * E * math.sqrt(M) / abs(P), rel=1e-13)
    assert guo_wu_bound(u) == pytest.approx(bound, rel=1e-13)
    # the bound must actually dominate the gradient it controls
    grad_sq = g.dx * float(np.sum(np.abs(np.fft.ifft(1j * g.k_first * np.fft.fft(u.values))) ** 2))
    assert grad_sq <= bound


def test_guo_wu_bound_guards():
    g = Grid(60.0, 512)
    wrong_mass = Field(g, np.exp(-(g.x**2)).astype(complex))
    with pytest.raises(Inapplicable):
        guo_wu_bound(wrong_mass)
    # borderline mass but rightward drift
    q = 2 * math.pi * 5 / 60.0
    u = _gaussian_with_mass(g, 4.0, boost=-q)
    assert momentum(u) > 0
    with pytest.raises(Inapplicable):
        guo_wu_bound(u)

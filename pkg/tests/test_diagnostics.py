"""Conserved functionals and norms against closed-form values."""

import math

import numpy as np
import pytest

from ckdv import (
    Feng,
    GearGrimshaw,
    HirotaSatsuma,
    Recorder,
    State,
    StepperConfig,
    Trajectory,
    collect,
    field_from_callable,
    gg_invariants,
    hs_invariants,
    mixed_norms,
    record_for,
    simulate,
    sobolev_norm,
    zero_field,
)
from ckdv.grid import Grid, l2_norm, spectral_derivative


def test_hs_invariants_sine_oracle(grid64):
    # u = 0, v = sin x on a 2*pi box: V = b*pi, F = (2/3) b*pi
    b = 2.0
    st = State(zero_field(grid64), field_from_callable(np.sin, grid64))
    for a in (-1.0, 0.5, 2.0):
        V, F = hs_invariants(st, a, b)
        assert V == pytest.approx(b * np.pi, rel=1e-13)
        assert F == pytest.approx(2.0 / 3.0 * b * np.pi, rel=1e-13)


def test_hs_invariants_cosine_oracle(grid64):
    # u = cos x, v = 0: V = (1+a) pi / 2 (the cubic term integrates to zero)
    a, b = 0.7, 3.0
    st = State(field_from_callable(np.cos, grid64), zero_field(grid64))
    V, F = hs_invariants(st, a, b)
    assert V == pytest.approx(0.5 * (1.0 + a) * np.pi, rel=1e-13)
    assert F == pytest.approx(np.pi, rel=1e-13)


def test_hs_invariants_cubic_terms(grid64):
    # u = 1 + cos x has int u^3 = 2 pi + 3 pi = 5 pi
    a, b = 0.0, 1.0
    st = State(field_from_callable(lambda x: 1.0 + np.cos(x), grid64), zero_field(grid64))
    V, _ = hs_invariants(st, a, b)
    want = 0.5 * (1.0 + a) * np.pi - (1.0 + a) * 5.0 * np.pi
    assert V == pytest.approx(want, rel=1e-13)


def test_gg_invariants_cosine_oracle(grid64):
    u = field_from_callable(np.cos, grid64)
    st = State(u, u.copy())
    base = GearGrimshaw(0.0, 0.0, 0.0, 1.0, 1.0)
    p1, p2, p3, p4 = gg_invariants(st, base)
    assert abs(p1) < 1e-13 and abs(p2) < 1e-13
    assert p3 == pytest.approx(2.0 * np.pi, rel=1e-13)
    assert p4 == pytest.approx(2.0 * np.pi, rel=1e-13)
    # the a3 cross term adds 2 b2 a3 int sin^2 = 2 b2 a3 pi; r subtracts r pi
    crossed = GearGrimshaw(0.0, 0.0, 0.5, 1.0, 1.0, r=0.3)
    p4c = gg_invariants(st, crossed)[3]
    assert p4c == pytest.approx(2.0 * np.pi + 2.0 * 0.5 * np.pi - 0.3 * np.pi, rel=1e-13)


def test_gg_invariants_mean_terms(grid64):
    st = State(
        field_from_callable(lambda x: 1.5 + 0.0 * x, grid64),
        field_from_callable(lambda x: -0.5 + 0.0 * x, grid64),
    )
    p1, p2, _, _ = gg_invariants(st, GearGrimshaw(0.0, 0.0, 0.0, 1.0, 1.0))
    assert p1 == pytest.approx(1.5 * 2.0 * np.pi, rel=1e-13)
    assert p2 == pytest.approx(-0.5 * 2.0 * np.pi, rel=1e-13)


def test_sobolev_norm_identity(grid128, gaussian128):
    f = gaussian128
    h1 = sobolev_norm(f, 1.0)
    fx = spectral_derivative(f, 1)
    assert h1**2 == pytest.approx(l2_norm(f) ** 2 + l2_norm(fx) ** 2, rel=1e-13)
    assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-14)


def test_sobolev_norm_single_mode(grid64):
    f = field_from_callable(lambda x: np.cos(3.0 * x), grid64)
    for s in (-1.5, -0.5, 0.0, 1.0, 2.5):
        want = (1.0 + 9.0) ** (s / 2.0) * np.sqrt(np.pi)
        assert sobolev_norm(f, s) == pytest.approx(want, rel=1e-12)


def test_record_for_hs(grid64):
    st = State(zero_field(grid64), field_from_callable(np.sin, grid64), t=0.5)
    rec = record_for(st, HirotaSatsuma(0.5, 2.0), s=1.0)
    assert rec.t == 0.5
    assert rec.V == pytest.approx(2.0 * np.pi)
    assert all(math.isnan(p) for p in (rec.phi1, rec.phi2, rec.phi3, rec.phi4))
    assert rec.valid
    assert len(rec.row()) == 9


def test_record_for_feng_uses_hs_functionals(grid64):
    st = State(zero_field(grid64), field_from_callable(np.sin, grid64))
    rec = record_for(st, Feng(0.5, 2.0, 1.0, 0.0))
    assert rec.V == pytest.approx(2.0 * np.pi)


def test_record_for_gg(grid64):
    u = field_from_callable(np.cos, grid64)
    rec = record_for(State(u, u.copy()), GearGrimshaw(0.0, 0.0, 0.0, 1.0, 1.0))
    assert math.isnan(rec.V) and math.isnan(rec.F)
    assert rec.phi3 == pytest.approx(2.0 * np.pi)
    assert rec.valid


def test_record_for_flags_nonfinite(grid64):
    from ckdv.grid import SpectralField

    bad = SpectralField(np.full(grid64.n, np.inf + 0j), grid64)
    with np.errstate(invalid="ignore", over="ignore"):
        rec = record_for(State(bad, zero_field(grid64)), GearGrimshaw(0.0, 0.0, 0.0, 1.0, 1.0))
    assert not rec.valid


def test_recorder_and_collect(grid128, gaussian128):
    spec = HirotaSatsuma(-1.0, 1.0)
    rec = Recorder(spec, s=1.0)
    st = State(gaussian128, zero_field(grid128))
    traj = simulate(st, spec, 0.02, StepperConfig(2e-3), observers=[rec], sample_dt=0.01)
    assert len(rec.records) == len(traj.states)
    again = collect(traj, spec)
    assert [r.t for r in again] == [r.t for r in rec.records]
    assert again[-1].F == pytest.approx(rec.records[-1].F, rel=1e-13)


def stationary_traj(field, spec, times):
    sts = [State(field.copy(), zero_field(field.grid), float(t)) for t in times]
    return Trajectory(sts, spec)


def test_mixed_norms_stationary_factorization(grid128, gaussian128):
    # a time-constant trajectory factorizes every mixed norm in closed form
    T = 0.75
    r = 0.5
    spec = HirotaSatsuma(-1.0, 1.0)
    traj = stationary_traj(gaussian128, spec, np.linspace(-T, T, 9))
    out = mixed_norms(traj, r, T)
    g = gaussian128
    gx = spectral_derivative(g, 1)
    sup_gx = np.max(np.abs(gx.values()))
    bu = out["u"]
    assert bu.max_norm_s == pytest.approx(sobolev_norm(g, r), rel=1e-12)
    assert bu.deriv_lt4_lxinf == pytest.approx((2.0 * T) ** 0.25 * sup_gx, rel=1e-12)
    frac = spectral_derivative(gx, float(r))
    assert bu.frac_lxinf_lt2 == pytest.approx(
        np.sqrt(2.0 * T) * np.max(np.abs(frac.values())), rel=1e-12
    )
    dx = g.grid.dx
    lx2 = np.sqrt(np.sum(np.abs(g.values()) ** 2) * dx)
    assert bu.lx2_ltinf == pytest.approx((1.0 + T) ** -0.5 * lx2, rel=1e-12)
    assert bu.deriv_lxinf_lt2 == pytest.approx(np.sqrt(2.0 * T) * sup_gx, rel=1e-12)
    assert bu.total == pytest.approx(
        bu.max_norm_s + bu.deriv_lt4_lxinf + bu.frac_lxinf_lt2 + bu.lx2_ltinf + bu.deriv_lxinf_lt2
    )
    # the v component is identically zero
    assert out["v"].total == 0.0


def test_mixed_norms_window_selection(grid128, gaussian128):
    spec = HirotaSatsuma(-1.0, 1.0)
    traj = stationary_traj(gaussian128, spec, [-2.0, -0.5, 0.0, 0.5, 2.0])
    out = mixed_norms(traj, 0.5, 1.0)  # keeps only |t| <= 1
    ref = mixed_norms(stationary_traj(gaussian128, spec, [-0.5, 0.0, 0.5]), 0.5, 1.0)
    assert out["u"].deriv_lxinf_lt2 == pytest.approx(ref["u"].deriv_lxinf_lt2, rel=1e-13)
    with pytest.raises(ValueError):
        mixed_norms(stationary_traj(gaussian128, spec, [-2.0, 2.0]), 0.5, 1.0)

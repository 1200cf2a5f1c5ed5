"""Centered-fan layer: ODE invariants, turning integrals, vacuum limit."""

import math

import numpy as np
import pytest

from bztflow import fan, shocks, thermo

G15 = thermo.GasModel(1.5)

# frozen by tests/oracles/gen_expected.py
S_STAR_15 = 0.3544893358184198
S98 = 0.3473995491020514
TAU1_I = 6.222021767887082
TAU2_I = 10.602988762877068
TAU_F_E = 5.451165090410962
TAU_D = 15.025623552912846
S_D = 0.34813341598088193
TAU_PO_POTENTIAL = 7.481738396911066


def upstream_state(mach=2.0, tau0=4.9):
    c0 = thermo.sound_speed(tau0, S98, G15)
    u0 = mach * c0
    alpha0 = math.asin(c0 / u0)
    return u0, tau0, alpha0


def upstream_fan(mach=2.0, tau0=4.9, stop=None):
    u0, tau0, alpha0 = upstream_state(mach, tau0)
    if stop is None:
        stop = fan.TargetTau(TAU_F_E)
    return fan.integrate_fan(u0, tau0, 0.0, S98, alpha0, stop, G15)


def bernoulli(q, tau, S):
    return 0.5 * q * q + thermo.enthalpy(tau, S, G15)


def test_zero_length_integration():
    u0, tau0, alpha0 = upstream_state()
    sol = fan.integrate_fan(u0, tau0, 0.0, S98, alpha0,
                            fan.TargetTau(tau0), G15)
    assert sol.theta_end == sol.theta_start
    q, tau, sigma, S = sol.state(alpha0)
    assert (q, tau, sigma, S) == (u0, tau0, 0.0, S98)


def test_initial_data_guards():
    u0, tau0, alpha0 = upstream_state()
    with pytest.raises(ValueError, match="sonic-degeneracy"):
        fan.integrate_fan(0.5 * thermo.sound_speed(tau0, S98, G15), tau0,
                          0.0, S98, alpha0, fan.TargetTau(TAU_F_E), G15)
    with pytest.raises(ValueError, match="not-centered"):
        fan.integrate_fan(u0, tau0, 0.0, S98, alpha0 + 1e-3,
                          fan.TargetTau(TAU_F_E), G15)


def test_upstream_fan_reaches_target_volume():
    sol = upstream_fan()
    assert sol.theta_end < sol.theta_start
    q, tau, sigma, S = sol.state(sol.theta_end)
    assert tau == pytest.approx(TAU_F_E, abs=1e-10)
    assert S == S98
    assert sigma < 0.0       # flow deflected toward the expansion


def test_upstream_fan_monotone_signs():
    sol = upstream_fan()
    tt = np.linspace(sol.theta_start, sol.theta_end, 60)
    states = np.array([sol.state(t)[:3] for t in tt])
    dq = np.diff(states[:, 0])
    dtau = np.diff(states[:, 1])
    dsig = np.diff(states[:, 2])
    # theta decreases along tt, so signs flip: q and tau grow, sigma drops
    assert np.all(dq > 0.0)
    assert np.all(dtau > 0.0)
    assert np.all(dsig < 0.0)


def test_fan_bernoulli_and_entropy_invariance():
    sol = upstream_fan()
    u0, tau0, _ = upstream_state()
    B0 = bernoulli(u0, tau0, S98)
    for t in np.linspace(sol.theta_start, sol.theta_end, 40):
        q, tau, sigma, S = sol.state(t)
        assert S == S98
        assert abs(bernoulli(q, tau, S) - B0) < 1e-10


def test_fan_ray_tangency():
    sol = upstream_fan()
    for t in np.linspace(sol.theta_start, sol.theta_end, 40):
        q, tau, sigma, S = sol.state(t)
        u, v = sol.velocity(t)
        c = thermo.sound_speed(tau, S, G15)
        assert abs(u * math.sin(t) - v * math.cos(t) - c) < 1e-9


def test_fan_state_out_of_range():
    sol = upstream_fan()
    with pytest.raises(ValueError, match="theta-out-of-range"):
        sol.state(sol.theta_start + 0.1)


def test_inflection_hit():
    # pushing the expansion past the locus crossing runs into the
    # inflection volume, where the ODE degenerates
    with pytest.raises(ValueError, match="inflection-hit"):
        upstream_fan(stop=fan.TargetTau(TAU1_I + 0.5))


def downstream_foot():
    """Back state of the tangent-chord shock at the upstream fan end."""
    sol = upstream_fan()
    phi_d = sol.theta_end
    u1, v1 = sol.velocity(phi_d)
    tau_b, S_b, m = shocks.double_sonic_back_state(TAU_F_E, G15, S_f=S98)
    u_d, v_d = shocks.oblique_back_velocity(u1, v1, phi_d, TAU_F_E, tau_b)
    return phi_d, u_d, v_d, tau_b, S_b


def test_downstream_foot_is_centered():
    phi_d, u_d, v_d, tau_d, S_d = downstream_foot()
    q_d = math.hypot(u_d, v_d)
    c_d = thermo.sound_speed(tau_d, S_d, G15)
    sigma_d = math.atan2(v_d, u_d)
    # the back side is sonic relative to the same ray: sigma + A = phi_d
    assert q_d > c_d
    assert sigma_d + math.asin(c_d / q_d) == pytest.approx(phi_d, abs=1e-9)
    assert sigma_d < 0.0


def test_downstream_fan_slip_stop():
    phi_d, u_d, v_d, tau_d, S_d = downstream_foot()
    sigma_d = math.atan2(v_d, u_d)
    theta_w = sigma_d - 0.05
    sol = fan.integrate_fan(math.hypot(u_d, v_d), tau_d, sigma_d, S_d,
                            phi_d, fan.SlipLine(theta_w), G15)
    q, tau, sigma, S = sol.state(sol.theta_end)
    assert sigma == pytest.approx(theta_w, abs=1e-12)
    u, v = sol.velocity(sol.theta_end)
    assert v == pytest.approx(u * math.tan(theta_w), abs=1e-12)
    assert tau > tau_d       # the wall fan keeps expanding


def test_fan_turning_matches_quadrature():
    # same turning angle from the ODE and from the speed-integral route
    phi_d, u_d, v_d, tau_d, S_d = downstream_foot()
    q_d = math.hypot(u_d, v_d)
    sigma_d = math.atan2(v_d, u_d)
    tau_target = 1e8
    sol = fan.integrate_fan(q_d, tau_d, sigma_d, S_d, phi_d,
                            fan.TargetTau(tau_target), G15)
    q_end, tau_end, sigma_end, _ = sol.state(sol.theta_end)
    pg = thermo.PotentialGas(
        gas=G15, S=S_d,
        bernoulli=0.5 * q_d**2 + thermo.enthalpy(tau_d, S_d, G15))
    q_hat = pg.speed_of_tau(tau_target)
    sigma_quad = sigma_d - fan.turning_angle(q_d, q_hat, pg)
    assert q_end == pytest.approx(q_hat, rel=1e-9)
    assert sigma_end == pytest.approx(sigma_quad, abs=1e-7)


def test_vacuum_angle_bounds_the_wall_fan():
    phi_d, u_d, v_d, tau_d, S_d = downstream_foot()
    q_d = math.hypot(u_d, v_d)
    sigma_d = math.atan2(v_d, u_d)
    off = fan.vacuum_angle(q_d, tau_d, S_d, G15)
    assert off < 0.0
    alpha_v = sigma_d + off
    assert alpha_v < sigma_d < phi_d
    # a wall just above the vacuum ray is still reachable
    sol = fan.integrate_fan(q_d, tau_d, sigma_d, S_d, phi_d,
                            fan.SlipLine(alpha_v + 5e-3), G15)
    assert sol.theta_end > alpha_v


def test_vacuum_angle_degenerate_offset():
    # foot speed within a whisker of the cavitation speed: almost no
    # turning left (the offset scales like sqrt(1 - q_d/q_lim))
    tau_far = 1e4
    q_far = 1e3 * thermo.sound_speed(tau_far, S_D, G15)
    off = fan.vacuum_angle(q_far, tau_far, S_D, G15)
    assert off < 0.0
    assert abs(off) < 1e-2


def test_vacuum_angle_guards():
    with pytest.raises(ValueError, match="sonic-degeneracy"):
        fan.vacuum_angle(0.5 * thermo.sound_speed(TAU_D, S_D, G15),
                         TAU_D, S_D, G15)
    with pytest.raises(ValueError, match="out-of-window"):
        fan.vacuum_angle(1.0, 0.5 * (TAU1_I + TAU2_I), S98, G15)


# ---------------------------------------------------------------------------
# potential-flow turning

def potential_anchor():
    tau_ref = TAU_PO_POTENTIAL
    c_ref = thermo.sound_speed(tau_ref, S98, G15)
    q_ref = 1.8 * c_ref
    pg = thermo.PotentialGas.from_state(G15, S98, q_ref, tau_ref,
                                        bernoulli=1.0)
    return pg, q_ref, tau_ref


def test_pm_potential_trivial_at_anchor():
    pg, q_ref, tau_ref = potential_anchor()
    sigma_ref = -0.1
    sig, alp = fan.pm_potential(tau_ref, pg, q_ref, sigma_ref, tau_ref)
    assert sig == pytest.approx(sigma_ref, abs=1e-13)
    A_ref = math.asin(pg.c(tau_ref) / q_ref)
    assert alp == pytest.approx(sigma_ref + A_ref, abs=1e-13)


def test_pm_potential_monotone_and_tangent():
    pg, q_ref, tau_ref = potential_anchor()
    sigma_ref = -0.1
    anchored = thermo.PotentialGas.from_state(G15, S98, q_ref, tau_ref,
                                              bernoulli=1.0)

    def row(tau):
        sig, alp = fan.pm_potential(tau, pg, q_ref, sigma_ref, tau_ref)
        q = anchored.speed_of_tau(tau)
        return sig, alp, q

    taus = np.linspace(TAU1_I + 0.25, tau_ref, 9)
    rows = [row(t) for t in taus]
    # turning signs on the window: sigma decreasing, ray angle increasing
    assert all(a[0] > b[0] for a, b in zip(rows, rows[1:]))
    assert all(a[1] < b[1] for a, b in zip(rows, rows[1:]))
    # ray tangency identities, with the velocity row (u, v) = q (cos, sin)
    d = 1e-6
    for tau in taus[1:-1]:
        sig, alp, q = row(tau)
        u, v = q * math.cos(sig), q * math.sin(sig)
        assert u * math.sin(alp) - v * math.cos(alp) == pytest.approx(
            anchored.c(tau), rel=1e-12)
        sp, ap_, qp = row(tau + d)
        sm, am, qm = row(tau - d)
        du = (qp * math.cos(sp) - qm * math.cos(sm)) / (2 * d)
        dv = (qp * math.sin(sp) - qm * math.sin(sm)) / (2 * d)
        assert abs(du * math.cos(alp) + dv * math.sin(alp)) < 1e-6 * q


def test_riemann_invariants_sum_and_fan_invariance():
    pg, q_ref, tau_ref = potential_anchor()
    anchored = thermo.PotentialGas.from_state(G15, S98, q_ref, tau_ref,
                                              bernoulli=1.0)
    sigma_ref = -0.1
    rp_ref = None
    for tau in np.linspace(TAU1_I + 0.25, tau_ref, 7):
        sig, alp = fan.pm_potential(tau, pg, q_ref, sigma_ref, tau_ref)
        q = anchored.speed_of_tau(tau)
        u, v = q * math.cos(sig), q * math.sin(sig)
        rp, rm = fan.riemann_invariants(u, v, anchored)
        assert rp + rm == pytest.approx(2.0 * sig, abs=1e-12)
        if rp_ref is None:
            rp_ref = rp
        else:
            # the fan is an integral curve of the plus family
            assert abs(rp - rp_ref) < 1e-9


def test_riemann_invariants_speed_partials():
    pg, q_ref, tau_ref = potential_anchor()
    anchored = thermo.PotentialGas.from_state(G15, S98, q_ref, tau_ref,
                                              bernoulli=1.0)
    q, sigma = q_ref, -0.05
    tau = thermo.tau_from_speed(q, anchored)
    c = anchored.c(tau)
    expect = q * c / (2.0 * math.sqrt(q * q - c * c))
    d = 1e-7
    # move along r_minus = const: dsigma = +dnu
    nu = fan.turning_angle(anchored.q_ref, q + d, anchored) - \
        fan.turning_angle(anchored.q_ref, q, anchored)
    u1, v1 = (q + d) * math.cos(sigma + nu), (q + d) * math.sin(sigma + nu)
    u0, v0 = q * math.cos(sigma), q * math.sin(sigma)
    rp1, rm1 = fan.riemann_invariants(u1, v1, anchored)
    rp0, rm0 = fan.riemann_invariants(u0, v0, anchored)
    assert rm1 == pytest.approx(rm0, abs=1e-12)
    assert d / (rp1 - rp0) == pytest.approx(expect, rel=1e-5)
    # move along r_plus = const: dsigma = -dnu
    u2, v2 = (q + d) * math.cos(sigma - nu), (q + d) * math.sin(sigma - nu)
    rp2, rm2 = fan.riemann_invariants(u2, v2, anchored)
    assert rp2 == pytest.approx(rp0, abs=1e-12)
    assert d / (rm2 - rm0) == pytest.approx(-expect, rel=1e-5)


def test_riemann_invariants_guards():
    pg, q_ref, tau_ref = potential_anchor()
    anchored = thermo.PotentialGas.from_state(G15, S98, q_ref, tau_ref,
                                              bernoulli=1.0)
    c = anchored.c(thermo.tau_from_speed(q_ref, anchored))
    with pytest.raises(ValueError, match="subsonic"):
        stag_tau = thermo.tau_from_speed(0.45 * q_ref, anchored)
        fan.riemann_invariants(0.45 * q_ref, 0.0, anchored)
    bare = thermo.PotentialGas(gas=G15, S=S98, bernoulli=1.0)
    with pytest.raises(ValueError, match="no-reference-speed"):
        fan.riemann_invariants(q_ref, 0.0, bare)

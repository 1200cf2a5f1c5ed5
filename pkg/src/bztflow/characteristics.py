"""
Characteristic geometry of 2D steady supersonic flow, and numerical
residual evaluators for the commutator relations and characteristic
decompositions that the wave constructions lean on.

A supersonic state (u, v) with sound speed c carries a frame of angles:
the flow angle sigma = atan2(v, u), the Mach angle A = arcsin(c/q), and
the two characteristic angles alpha = sigma + A, beta = sigma - A. The
plus/minus characteristic slopes are tan(alpha) and tan(beta), and the
velocity is recovered from the frame by u = c cos(sigma)/sin(A),
v = c sin(sigma)/sin(A).

Directional derivatives along the frame directions,

    d+ = cos(alpha) d_x + sin(alpha) d_y,
    d- = cos(beta)  d_x + sin(beta)  d_y,
    d0 = cos(sigma) d_x + sin(sigma) d_y,

do not commute when the frame varies in space; the residual evaluators
below check the exact exchange relations against black-box flow fields.
First derivatives are taken by central differences of step h along the
frame direction of the evaluation point; the second (nested) application
uses a forward step, so the composed residuals shrink at first order
in h. Fields are assumed smooth on the stencil (within ~2h of the
point) with the flow angle away from the atan2 branch cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .fan import riemann_invariants
from .thermo import (
    GasModel,
    PotentialGas,
    pressure_tau,
    pressure_tautau,
    sound_speed,
    tau_from_speed,
)


# ---------------------------------------------------------------------------
# frames

@dataclass(frozen=True)
class CharacteristicFrame:
    """Angle frame of one supersonic state.

    sigma: flow angle; A: Mach angle; alpha/beta: plus and minus
    characteristic angles; lambda_plus/lambda_minus: the slopes
    tan(alpha), tan(beta).
    """

    sigma: float
    A: float
    alpha: float
    beta: float
    lambda_plus: float
    lambda_minus: float


def frame_from_state(u, v, c):
    """Characteristic frame of the supersonic state (u, v) at sound speed c.

    Raises "subsonic" unless q = |(u, v)| exceeds c > 0.
    """
    q = math.hypot(u, v)
    if not c > 0.0 or q <= c:
        raise ValueError(f"subsonic: speed q={q} not above sound speed c={c}")
    sigma = math.atan2(v, u)
    A = math.asin(c / q)
    alpha = sigma + A
    beta = sigma - A
    return CharacteristicFrame(sigma=sigma, A=A, alpha=alpha, beta=beta,
                               lambda_plus=math.tan(alpha),
                               lambda_minus=math.tan(beta))


def velocity_from_frame(frame, c):
    """(u, v) = c (cos sigma, sin sigma)/sin A, inverse of frame_from_state."""
    f = c / math.sin(frame.A)
    return f * math.cos(frame.sigma), f * math.sin(frame.sigma)


# ---------------------------------------------------------------------------
# pointwise samples

@dataclass(frozen=True)
class FieldSample:
    """One state and its first plane partials at a point."""

    u: float
    v: float
    tau: float
    S: float
    u_x: float
    u_y: float
    v_x: float
    v_y: float
    tau_x: float
    tau_y: float
    S_x: float
    S_y: float

    @property
    def omega(self):
        """Vorticity u_y - v_x."""
        return self.u_y - self.v_x


@dataclass(frozen=True)
class Directional:
    """Directional derivatives of the four state components."""

    u: float
    v: float
    tau: float
    S: float


def _project(sample, theta):
    cx, sy = math.cos(theta), math.sin(theta)
    return Directional(u=cx * sample.u_x + sy * sample.u_y,
                       v=cx * sample.v_x + sy * sample.v_y,
                       tau=cx * sample.tau_x + sy * sample.tau_y,
                       S=cx * sample.S_x + sy * sample.S_y)


def directional_derivatives(sample, frame):
    """(d+, d-, d0) of the sample's components along the frame directions.

    Satisfies d+ + d- = 2 cos(A) d0 componentwise.
    """
    return (_project(sample, frame.alpha),
            _project(sample, frame.beta),
            _project(sample, frame.sigma))


def plane_gradient(dplus, dminus, frame):
    """Recover the plane partials (d_x, d_y) from the pair (d+, d-).

    Inverts the 2x2 direction system; sin(2A) never vanishes on a strictly
    supersonic frame.
    """
    s2A = math.sin(2.0 * frame.A)
    sa, sb = math.sin(frame.alpha), math.sin(frame.beta)
    ca, cb = math.cos(frame.alpha), math.cos(frame.beta)

    def inv(p, m):
        return (-(sb * p - sa * m) / s2A, (cb * p - ca * m) / s2A)

    gx = {}
    gy = {}
    for name in ("u", "v", "tau", "S"):
        x, y = inv(getattr(dplus, name), getattr(dminus, name))
        gx[name] = x
        gy[name] = y
    return Directional(**gx), Directional(**gy)


# ---------------------------------------------------------------------------
# flow fields as callables

@dataclass(frozen=True)
class FlowField:
    """Euler flow patch: fn(x, y) -> (u, v, tau, S), closed by a gas model.

    fn must be safe for repeated and concurrent invocation; the residual
    evaluators call it on small stencils around the requested point.
    """

    fn: Callable[[float, float], tuple]
    gas: GasModel

    def state(self, x, y):
        return self.fn(x, y)

    def density(self, x, y):
        return 1.0 / self.fn(x, y)[2]

    def frame(self, x, y):
        u, v, tau, S = self.fn(x, y)
        return frame_from_state(u, v, sound_speed(tau, S, self.gas))


@dataclass(frozen=True)
class PotentialFlowField:
    """Potential flow patch: fn(x, y) -> (u, v) on a fixed isentrope.

    tau and c follow from the Bernoulli law of pgas, and the Riemann
    invariants are anchored at pgas.q_ref.
    """

    fn: Callable[[float, float], tuple]
    pgas: PotentialGas

    def state(self, x, y):
        return self.fn(x, y)

    def volume(self, x, y):
        u, v = self.fn(x, y)
        return tau_from_speed(math.hypot(u, v), self.pgas)

    def density(self, x, y):
        return 1.0 / self.volume(x, y)

    def frame(self, x, y):
        u, v = self.fn(x, y)
        tau = tau_from_speed(math.hypot(u, v), self.pgas)
        return frame_from_state(u, v, self.pgas.c(tau))

    def invariants(self, x, y):
        u, v = self.fn(x, y)
        return riemann_invariants(u, v, self.pgas)


# ---------------------------------------------------------------------------
# finite-difference directional operators

def _frame_angle(frame, which):
    if which == "plus":
        return frame.alpha
    if which == "minus":
        return frame.beta
    return frame.sigma


def dbar(field, scalar, which, h):
    """Central-difference d+/d-/d0 of scalar(x, y) as a new callable.

    The direction is frozen at each evaluation point's own frame.
    """
    def d(x, y):
        th = _frame_angle(field.frame(x, y), which)
        cx, sy = math.cos(th), math.sin(th)
        return (scalar(x + h * cx, y + h * sy)
                - scalar(x - h * cx, y - h * sy)) / (2.0 * h)
    return d


def _dbar_forward(field, scalar, which, h):
    # one-sided outer application: keeps nested second derivatives at one
    # field evaluation per direction and makes the composed residuals O(h)
    def d(x, y):
        th = _frame_angle(field.frame(x, y), which)
        cx, sy = math.cos(th), math.sin(th)
        return (scalar(x + h * cx, y + h * sy) - scalar(x, y)) / h
    return d


# ---------------------------------------------------------------------------
# commutator residuals

def commutator_residual(field, point, h, kind="cross", test=None):
    """Residual of an exchange relation of the frame derivatives at a point.

    kind "cross" checks

        (d- d+ - d+ d-) f = [ (cos2A d+beta - d-alpha) d- f
                              - (d+beta - cos2A d-alpha) d+ f ] / sin2A,

    kind "stream" checks

        (d0 d+ - d+ d0) f = [ (cosA d+sigma - d0alpha) d0 f
                              - (d+sigma - cosA d0alpha) d+ f ] / sinA.

    f defaults to the field's density. Returns |lhs - rhs|; first order
    in h on smooth fields.
    """
    x0, y0 = point
    if test is None:
        test = field.density
    fr0 = field.frame(x0, y0)

    dp = dbar(field, test, "plus", h)
    alpha_of = lambda x, y: field.frame(x, y).alpha

    if kind == "cross":
        dm = dbar(field, test, "minus", h)
        lhs = (_dbar_forward(field, dp, "minus", h)(x0, y0)
               - _dbar_forward(field, dm, "plus", h)(x0, y0))
        beta_of = lambda x, y: field.frame(x, y).beta
        dpb = dbar(field, beta_of, "plus", h)(x0, y0)
        dma = dbar(field, alpha_of, "minus", h)(x0, y0)
        c2A = math.cos(2.0 * fr0.A)
        rhs = ((c2A * dpb - dma) * dm(x0, y0)
               - (dpb - c2A * dma) * dp(x0, y0)) / math.sin(2.0 * fr0.A)
        return abs(lhs - rhs)

    if kind == "stream":
        d0 = dbar(field, test, "zero", h)
        lhs = (_dbar_forward(field, dp, "zero", h)(x0, y0)
               - _dbar_forward(field, d0, "plus", h)(x0, y0))
        sigma_of = lambda x, y: field.frame(x, y).sigma
        dps = dbar(field, sigma_of, "plus", h)(x0, y0)
        d0a = dbar(field, alpha_of, "zero", h)(x0, y0)
        cA = math.cos(fr0.A)
        rhs = ((cA * dps - d0a) * d0(x0, y0)
               - (dps - cA * d0a) * dp(x0, y0)) / math.sin(fr0.A)
        return abs(lhs - rhs)

    raise ValueError(f"unknown-kind: {kind}")


# ---------------------------------------------------------------------------
# characteristic decompositions

def decomposition_residual_potential(field, point, h):
    """Residuals of the invariant-form decompositions on a potential field.

    Checks, with F = -q^2 tau p''/(4 (q^2-c^2) p' sin2A),

        d- d+ r+ = -F (d+ r+ - cos2A d- r-) d+ r+,
        d+ d- r- =  F (d- r- - cos2A d+ r+) d- r-,

    and returns (r_plus, r_minus) = absolute residuals of the two lines.
    The field must be an exact (or manufactured) solution of the potential
    system on the stencil; residuals then vanish at first order in h.
    """
    x0, y0 = point
    pgas = field.pgas

    rp_of = lambda x, y: field.invariants(x, y)[0]
    rm_of = lambda x, y: field.invariants(x, y)[1]
    dp_rp = dbar(field, rp_of, "plus", h)
    dm_rm = dbar(field, rm_of, "minus", h)

    lhs_plus = _dbar_forward(field, dp_rp, "minus", h)(x0, y0)
    lhs_minus = _dbar_forward(field, dm_rm, "plus", h)(x0, y0)

    u, v = field.state(x0, y0)
    q = math.hypot(u, v)
    tau = tau_from_speed(q, pgas)
    c = pgas.c(tau)
    A = math.asin(c / q)
    F = (-q * q * tau * pgas.p_tautau(tau)
         / (4.0 * (q * q - c * c) * pgas.p_tau(tau) * math.sin(2.0 * A)))

    c2A = math.cos(2.0 * A)
    dp0 = dp_rp(x0, y0)
    dm0 = dm_rm(x0, y0)
    r_plus = abs(lhs_plus + F * (dp0 - c2A * dm0) * dp0)
    r_minus = abs(lhs_minus - F * (dm0 - c2A * dp0) * dm0)
    return r_plus, r_minus


def decomposition_residual_euler_isentropic(field, point, h, tol=1e-8):
    """Residuals of the density decompositions on an isentropic Euler field.

    With K = tau^4 p_tautau/(4 c^2 cos^2 A) and the coupling coefficient
    phi = 2 sin^2 A - 8 p_tau cos^4 A/(tau p_tautau), checks

        d- d+ rho = K [ (d+ rho)^2 + (phi - 1) d- rho d+ rho ],
        d+ d- rho = K [ (d- rho)^2 + (phi - 1) d- rho d+ rho ],

    valid only when the entropy terms drop out: raises
    "entropy-gradient-present" if |d+ S| at the point exceeds tol. The
    field should also be irrotational; a vortical field simply leaves a
    nonvanishing residual. Returns (r_plus, r_minus) for the two lines.
    """
    x0, y0 = point

    S_of = lambda x, y: field.state(x, y)[3]
    dpS = dbar(field, S_of, "plus", h)(x0, y0)
    if abs(dpS) > tol:
        raise ValueError(
            f"entropy-gradient-present: |d+S|={abs(dpS)} exceeds {tol}; "
            "the reduced decomposition does not apply")

    dp = dbar(field, field.density, "plus", h)
    dm = dbar(field, field.density, "minus", h)
    lhs_plus = _dbar_forward(field, dp, "minus", h)(x0, y0)
    lhs_minus = _dbar_forward(field, dm, "plus", h)(x0, y0)

    u, v, tau, S = field.state(x0, y0)
    c = sound_speed(tau, S, field.gas)
    A = math.asin(c / math.hypot(u, v))
    pt = pressure_tau(tau, S, field.gas)
    ptt = pressure_tautau(tau, S, field.gas)
    cosA2 = math.cos(A) ** 2
    K = tau**4 * ptt / (4.0 * c * c * cosA2)
    phi = 2.0 * math.sin(A) ** 2 - 8.0 * pt * cosA2 * cosA2 / (tau * ptt)

    dp0 = dp(x0, y0)
    dm0 = dm(x0, y0)
    cross = (phi - 1.0) * dm0 * dp0
    r_plus = abs(lhs_plus - K * (dp0 * dp0 + cross))
    r_minus = abs(lhs_minus - K * (dm0 * dm0 + cross))
    return r_plus, r_minus

# thermo.py
"""
Reduced van der Waals thermodynamics for dense-gas (BZT) flow.

All quantities are in the reduced form with unit covolume: tau > 1 is the
scaled specific volume, and isentropes are labelled by the scaled entropy
S > 0, so that the pressure along an isentrope is

    p(tau, S) = S/(tau-1)^gamma - 1/tau^2.

For gamma between 1 and 2 an isentrope can lose convexity: the fundamental
derivative changes sign between two inflection points, which is the mechanism
behind the nonclassical (rarefaction-shock) wave objects built on top of this
module. Two loci organise that structure:

  * the inflection locus i(tau): states where p_tautau = 0,
  * the double-sonic locus d(tau): states that can be an endpoint of a shock
    whose chord is tangent to the isentrope at both endpoints.

They coincide, tangentially, at tau* = 4/(2-gamma). The entropy value through
that tangency point, S*, is the largest entropy whose isentrope still has
inflection points; S_cr < S* is the smallest entropy whose isentrope stays in
the hyperbolic region (p_tau < 0 everywhere).

Euler flow carries (tau, S) states; potential flow freezes one isentrope and
adds a Bernoulli constant, wrapped in PotentialGas.
"""

from dataclasses import dataclass, field

from scipy.optimize import brentq

BRENT_XTOL = 1e-13
BRENT_MAXITER = 200


@dataclass(frozen=True)
class GasModel:
    """Reduced van der Waals gas with polytropic exponent gamma in (1, 2)."""

    gamma: float

    def __post_init__(self):
        g = self.gamma
        if not (1.0 < g < 2.0 - 1e-6):
            raise ValueError(
                f"gamma-out-of-range: gamma={g} must lie in (1, 2-1e-6)")


@dataclass(frozen=True)
class EulerThermoState:
    """A (tau, S) point: scaled specific volume and entropy."""

    tau: float
    S: float

    def __post_init__(self):
        if not self.tau > 1.0:
            raise ValueError(f"tau-out-of-range: tau={self.tau} must be > 1")
        if not self.S > 0.0:
            raise ValueError(f"entropy-out-of-range: S={self.S} must be > 0")


# ---------------------------------------------------------------------------
# pressure and its partial derivatives

def pressure(tau, S, gas):
    """
    Pressure on the isentrope S at volume tau.

    tau: scaled specific volume (> 1)
    S: scaled entropy (> 0)
    gas: GasModel
    Returns: p
    """
    return S / (tau - 1.0) ** gas.gamma - 1.0 / tau**2


def pressure_tau(tau, S, gas):
    """d p / d tau at fixed S."""
    g = gas.gamma
    return -g * S / (tau - 1.0) ** (g + 1.0) + 2.0 / tau**3


def pressure_tautau(tau, S, gas):
    """d2 p / d tau2 at fixed S."""
    g = gas.gamma
    return g * (g + 1.0) * S / (tau - 1.0) ** (g + 2.0) - 6.0 / tau**4


def pressure_tautautau(tau, S, gas):
    """d3 p / d tau3 at fixed S."""
    g = gas.gamma
    return (-g * (g + 1.0) * (g + 2.0) * S / (tau - 1.0) ** (g + 3.0)
            + 24.0 / tau**5)


def pressure_S(tau, S, gas):
    """d p / d S at fixed tau."""
    return 1.0 / (tau - 1.0) ** gas.gamma


def pressure_tauS(tau, S, gas):
    """d2 p / d tau d S."""
    g = gas.gamma
    return -g / (tau - 1.0) ** (g + 1.0)


def pressure_tautauS(tau, S, gas):
    """d3 p / d tau2 d S."""
    g = gas.gamma
    return g * (g + 1.0) / (tau - 1.0) ** (g + 2.0)


def entropy_of(p, tau, gas):
    """Entropy label of the isentrope through (p, tau)."""
    return (p + 1.0 / tau**2) * (tau - 1.0) ** gas.gamma


# ---------------------------------------------------------------------------
# derived state functions

def sound_speed(tau, S, gas):
    """
    Sound speed c = tau * sqrt(-p_tau).

    Raises ValueError("subsonic-thermo...") when p_tau >= 0, i.e. when the
    state has left the hyperbolic region.
    """
    pt = pressure_tau(tau, S, gas)
    if pt >= 0.0:
        raise ValueError(
            f"subsonic-thermo: p_tau={pt} >= 0 at tau={tau}, S={S}; "
            "state outside the hyperbolic region")
    return tau * (-pt) ** 0.5


def fundamental_derivative(tau, S, gas):
    """
    Fundamental derivative G = -tau * p_tautau / (2 p_tau).

    G < 0 marks the nonconvex (BZT) segment of the isentrope.
    """
    pt = pressure_tau(tau, S, gas)
    if pt == 0.0:
        raise ValueError(
            f"subsonic-thermo: p_tau=0 at tau={tau}, S={S}; "
            "fundamental derivative undefined")
    return -tau * pressure_tautau(tau, S, gas) / (2.0 * pt)


def internal_energy(tau, S, gas):
    """Specific internal energy on the isentrope S."""
    g = gas.gamma
    return S / ((g - 1.0) * (tau - 1.0) ** (g - 1.0)) - 1.0 / tau


def enthalpy(tau, S, gas):
    """
    Specific enthalpy, normalised so that h -> 0 as tau -> infinity.

    Satisfies h_tau = tau * p_tau along an isentrope.
    """
    g = gas.gamma
    return (g * S / ((g - 1.0) * (tau - 1.0) ** (g - 1.0))
            + S / (tau - 1.0) ** g - 2.0 / tau)


def enthalpy_S(tau, S, gas):
    """d h / d S at fixed tau."""
    g = gas.gamma
    return (g / ((g - 1.0) * (tau - 1.0) ** (g - 1.0))
            + 1.0 / (tau - 1.0) ** g)


# ---------------------------------------------------------------------------
# the two organising loci

def inflection_locus(tau, gas):
    """
    Pressure i(tau) at which the isentrope through (i, tau) has an
    inflection point exactly at tau.
    """
    g = gas.gamma
    return ((6.0 / (g * (g + 1.0)) * (1.0 - 1.0 / tau) ** 2 - 1.0) / tau**2)


def inflection_entropy(tau, gas):
    """Entropy label S(i(tau), tau) of the inflection locus."""
    return entropy_of(inflection_locus(tau, gas), tau, gas)


def double_sonic_locus(tau, gas):
    """
    Pressure d(tau) of the double-sonic locus: the set of states that can be
    either endpoint of a shock whose chord is tangent to the isentrope at
    both endpoints. Touches i(tau) exactly at tau* = 4/(2-gamma).
    """
    g = gas.gamma
    num = ((2.0 - g) ** 2 * tau**3
           - (2.0 - g) * (4.0 - 3.0 * g) * tau**2
           - 8.0 * (g - 1.0) * tau
           - 4.0)
    return num / (2.0 * g * (g + 1.0) * tau**4)


def double_sonic_entropy(tau, gas):
    """
    Entropy label S_hat(tau) = S(d(tau), tau) of the double-sonic locus.

    Computed by composition rather than from an expanded polynomial so that
    S_hat(tau*) equals S* to rounding.
    """
    return entropy_of(double_sonic_locus(tau, gas), tau, gas)


def eta_hat(tau, gas):
    """
    Volume ratio tau_b/tau_f of the double-sonic shock whose front volume is
    tau: the double root of the sonic-shock quadratic on the locus d.
    """
    den = (2.0 - gas.gamma) * tau - 2.0
    if den <= 0.0:
        raise ValueError(
            f"not-on-locus: tau={tau} below the double-sonic ratio pole")
    return 2.0 / den


def critical_entropies(gas, newton_tol=1e-14, max_iter=80):
    """
    The two organising entropy values of the gas.

    Returns (S_star, tau_star, S_cr):
      S_star: entropy through the tangency point of the loci; for S above it
              the isentrope has no inflection points.
      tau_star: the tangency volume 4/(2-gamma).
      S_cr: entropy whose isentrope is tangent to the p_tau = 0 boundary; for
            S above it, p_tau < 0 for every tau > 1.

    S_cr is located by a damped Newton iteration on {p_tau = 0, p_tautau = 0}
    seeded at tau_star, with a bisection fallback on the p_tau = 0 envelope.
    """
    g = gas.gamma
    tau_star = 4.0 / (2.0 - g)
    S_star = inflection_entropy(tau_star, gas)

    def newton(tau, S):
        # damped Newton on F(tau, S) = (p_tau, p_tautau); the seed point
        # sits where p_tautau has a double root in tau, which makes the
        # Jacobian near-singular there, so steps are capped and iterates
        # escaping a sane volume window are declared failed (the residuals
        # also vanish in the spurious tau -> infinity limit)
        for _ in range(max_iter):
            f1 = pressure_tau(tau, S, gas)
            f2 = pressure_tautau(tau, S, gas)
            if abs(f1) < newton_tol and abs(f2) < newton_tol:
                return tau, S, True
            j11 = pressure_tautau(tau, S, gas)
            j12 = pressure_tauS(tau, S, gas)
            j21 = pressure_tautautau(tau, S, gas)
            j22 = pressure_tautauS(tau, S, gas)
            det = j11 * j22 - j12 * j21
            if det == 0.0:
                return tau, S, False
            dtau = -(f1 * j22 - f2 * j12) / det
            dS = -(j11 * f2 - j21 * f1) / det
            cap = max(abs(dtau) / (0.3 * (tau - 1.0)), abs(dS) / (0.3 * S))
            if cap > 1.0:
                dtau /= cap
                dS /= cap
            lam, n0 = 1.0, abs(f1) + abs(f2)
            while lam > 1e-12:
                t_new, S_new = tau + lam * dtau, S + lam * dS
                if t_new > 1.0 and S_new > 0.0:
                    n1 = (abs(pressure_tau(t_new, S_new, gas))
                          + abs(pressure_tautau(t_new, S_new, gas)))
                    if n1 < n0:
                        break
                lam *= 0.5
            tau, S = tau + lam * dtau, S + lam * dS
            if not (1.0 < tau < 100.0 * tau_star and 0.0 < S):
                return tau, S, False
        return tau, S, False

    tau, S, ok = newton(tau_star, S_star)
    if not ok:
        # fallback: S_cr is the maximum over tau of the p_tau = 0 envelope
        # S = 2 (tau-1)^(gamma+1) / (gamma tau^3); bisect on its derivative
        # sign change, then polish with the same Newton from that point
        def denv(t):
            return (g + 1.0) * t - 3.0 * (t - 1.0)
        t_cr = brentq(denv, 1.0 + 1e-12, 100.0 * tau_star,
                      xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)
        S_env = 2.0 * (t_cr - 1.0) ** (g + 1.0) / (g * t_cr**3)
        tau, S, ok = newton(t_cr, S_env)
        if not ok:
            raise RuntimeError(
                "critical-entropy-solve-failed: no convergence for "
                f"gamma={g}")
    return S_star, tau_star, S


def inflection_roots(S, gas):
    """
    The two inflection volumes tau1 < tau* < tau2 of the isentrope S.

    Raises ValueError("no-inflection...") when S >= S* (the pair has
    coalesced) or S <= 0.
    """
    g = gas.gamma
    tau_star = 4.0 / (2.0 - g)
    S_star = inflection_entropy(tau_star, gas)
    if S <= 0.0 or S >= S_star:
        raise ValueError(
            f"no-inflection: S={S} outside (0, S*={S_star}); the isentrope "
            "has no inflection pair")

    def f(t):
        return pressure_tautau(t, S, gas)

    lo = 1.0 + 1e-12
    while f(lo) <= 0.0:
        lo = 1.0 + (lo - 1.0) * 1e2
        if lo >= tau_star:
            raise ValueError(f"no-inflection: bracket failure at S={S}")
    tau1 = brentq(f, lo, tau_star, xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)
    hi = 2.0 * tau_star
    for _ in range(200):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    tau2 = brentq(f, tau_star, hi, xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)
    return tau1, tau2


def locus_intersections(S, gas):
    """
    Volumes (tau_f_e, tau_b_e) where the isentrope S crosses the
    double-sonic locus, taken as the first crossing on each side of tau*.
    They bracket the inflection pair: tau_f_e < tau1 < tau* < tau2 < tau_b_e.

    Raises ValueError("no-intersection...") when S is not below S* (no
    crossings adjacent to tau*).
    """
    g = gas.gamma
    tau_star = 4.0 / (2.0 - g)
    S_star = inflection_entropy(tau_star, gas)
    if not 0.0 < S < S_star:
        raise ValueError(
            f"no-intersection: S={S} not in (0, S*={S_star})")

    def f(t):
        return pressure(t, S, gas) - double_sonic_locus(t, gas)

    # scan outward from tau* for the first sign change on each side
    def first_crossing(direction):
        step = direction * 0.01 * (tau_star - 1.0)
        t_prev, f_prev = tau_star, f(tau_star)
        for _ in range(100000):
            t_next = t_prev + step
            if t_next <= 1.0:
                raise ValueError(
                    f"no-intersection: no locus crossing below tau* at S={S}")
            f_next = f(t_next)
            if (f_prev > 0.0) != (f_next > 0.0):
                a, b = sorted((t_prev, t_next))
                return brentq(f, a, b, xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)
            t_prev, f_prev = t_next, f_next
        raise ValueError(f"no-intersection: no locus crossing at S={S}")

    return first_crossing(-1.0), first_crossing(+1.0)


# ---------------------------------------------------------------------------
# potential-flow gas model

@dataclass(frozen=True)
class PotentialGas:
    """
    One frozen isentrope plus a Bernoulli invariant, as used by the
    irrotational (potential) flow model.

    gas: underlying GasModel
    S: the frozen entropy label
    bernoulli: value of q^2/2 + h along the flow (default 0, the convention
        in which the enthalpy offset absorbs the incoming state)
    h_ref: additive enthalpy normalization; h(tau) = h_nat(tau) + h_ref where
        h_nat -> 0 as tau -> infinity
    q_ref: reference speed anchoring the turning-angle integral of the
        Riemann invariants (set by each construction; comparisons of
        invariants are meaningful only within one construction)
    """

    gas: GasModel
    S: float
    bernoulli: float = 0.0
    h_ref: float = 0.0
    q_ref: float = field(default=0.0)

    @classmethod
    def from_state(cls, gas, S, q0, tau0, bernoulli=0.0):
        """
        Build the model anchored at speed q0 and volume tau0, shifting the
        enthalpy so that q0^2/2 + h(tau0) = bernoulli.
        """
        h_ref = bernoulli - 0.5 * q0**2 - enthalpy(tau0, S, gas)
        return cls(gas=gas, S=S, bernoulli=bernoulli, h_ref=h_ref, q_ref=q0)

    # -- curve evaluations on the frozen isentrope ------------------------
    def p(self, tau):
        return pressure(tau, self.S, self.gas)

    def p_tau(self, tau):
        return pressure_tau(tau, self.S, self.gas)

    def p_tautau(self, tau):
        return pressure_tautau(tau, self.S, self.gas)

    def h(self, tau):
        return enthalpy(tau, self.S, self.gas) + self.h_ref

    def c(self, tau):
        return sound_speed(tau, self.S, self.gas)

    def kappa(self, tau):
        """Curvature ratio -2 p_tau / (tau p_tautau + 2 p_tau)."""
        pt, ptt = self.p_tau(tau), self.p_tautau(tau)
        return -2.0 * pt / (tau * ptt + 2.0 * pt)

    def h_limit(self):
        """Enthalpy in the vacuum limit tau -> infinity."""
        return self.h_ref

    def q_limit(self):
        """Cavitation speed sqrt(2 (bernoulli - h_limit))."""
        gap = 2.0 * (self.bernoulli - self.h_limit())
        if gap <= 0.0:
            raise ValueError(
                f"cavitation: bernoulli={self.bernoulli} at or below the "
                "vacuum enthalpy")
        return gap ** 0.5

    def speed_of_tau(self, tau):
        """Flow speed at volume tau from the Bernoulli invariant."""
        gap = 2.0 * (self.bernoulli - self.h(tau))
        if gap < 0.0:
            raise ValueError(
                f"stagnation-out-of-range: h(tau={tau}) above the Bernoulli "
                "level; no real speed")
        return gap ** 0.5


def tau_from_speed(q, pgas):
    """
    Volume tau with q^2/2 + h(tau) = bernoulli on the potential model.

    The enthalpy is strictly decreasing in tau, so the root is unique.
    Raises ValueError("cavitation...") for q at or beyond the cavitation
    speed and ValueError("stagnation-out-of-range...") when no bracket
    exists at the low-speed end.
    """
    target = pgas.bernoulli - 0.5 * q * q
    if target <= pgas.h_limit():
        raise ValueError(
            f"cavitation: speed q={q} at or beyond the cavitation speed "
            f"{pgas.q_limit()}")

    def f(t):
        return pgas.h(t) - target

    lo = 1.0 + 1e-12
    hi = 2.0
    f_lo = f(lo)
    if f_lo < 0.0:
        raise ValueError(
            f"stagnation-out-of-range: no volume with h = {target}")
    for _ in range(2000):
        if f(hi) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise ValueError(
            f"stagnation-out-of-range: no volume with h = {target}")
    return brentq(f, lo, hi, xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)


def tau_from_enthalpy_gap(gap, pgas):
    """
    Volume tau with h(tau) - h_limit = gap on the potential model.

    Equivalent to tau_from_speed at q = sqrt(q_limit^2 - 2 gap), but takes
    the gap itself so that callers near the cavitation limit can supply it
    without the cancellation of bernoulli - q^2/2.  Requires gap > 0.
    """
    if gap <= 0.0:
        raise ValueError(f"cavitation: enthalpy gap {gap} not positive")

    def f(t):
        return pgas.h(t) - pgas.h_limit() - gap

    lo = 1.0 + 1e-12
    hi = 2.0
    if f(lo) < 0.0:
        raise ValueError(
            f"stagnation-out-of-range: no volume with enthalpy gap {gap}")
    for _ in range(2000):
        if f(hi) < 0.0:
            break
        lo = hi
        hi *= 2.0
    else:
        raise ValueError(
            f"stagnation-out-of-range: no volume with enthalpy gap {gap}")
    return brentq(f, lo, hi, xtol=BRENT_XTOL, maxiter=BRENT_MAXITER)

"""Einstein systems for the deformed metric and their solution families.

Three layers:

* the ten-equation pointwise system for Ric = A g in terms of sigma and
  rho (``einstein_residuals``), plus its warped-product reduction
  (``warped_residuals``) and single-parameter reduction
  (``single_param_residuals``);

* warped-product profiles alpha(t) governed by the first-order system
  (alpha, gamma, delta)' = (gamma, delta, 2 gamma delta/alpha
  + delta^2/gamma - 2 Ctilde gamma^2) with conserved quantity
  A = C alpha^2 + (B alpha^2/gamma)(delta/alpha - 3 gamma^2/alpha^2);

* single-parameter profiles rho(t) governed by
  rho' = alpha (rho^3 - beta^3), with sigma reconstructed as
  sigma = b rho |rho'|^(-1/2) and Einstein constant
  A = -3 b^2 e for rho' > 0 (+3 b^2 e for rho' < 0), e = -alpha beta^3.

Integration is classical fixed-step RK4.  Blow-up of rho is detected at
|rho| > 1e3 and the escape time is refined by bisection on the last
step down to 1e-6 in t; warped states stop at |component| > 1e6 or when
gamma crosses zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .deform import DeformationPair, metric_of
from .expr import DomainError
from .fields import ExpressionField, ProfileField, ScalarField
from .oracle import MetricField

__all__ = [
    "REACHED_T_MAX",
    "BLOW_UP",
    "SINGULAR_GAMMA",
    "FamilyParams",
    "WarpedState",
    "Trajectory",
    "EndDiagnostics",
    "einstein_residuals",
    "warped_residuals",
    "warped_rhs",
    "integrate_warped",
    "warped_integral",
    "rho_rhs",
    "integrate_rho",
    "implicit_time",
    "sigma_from_rho",
    "einstein_constant",
    "family_fields",
    "family_metric",
    "ricci_flat_fields",
    "hyperbolic_fields",
    "single_param_residuals",
    "end_diagnostics",
]

REACHED_T_MAX = "reached-t-max"
BLOW_UP = "blow-up"
SINGULAR_GAMMA = "singular-gamma"

RHO_BLOW_UP_CAP = 1e3
WARPED_COMPONENT_CAP = 1e6
GAMMA_SINGULAR_TOL = 1e-8
BLOW_UP_TIME_TOL = 1e-6


# ---------------------------------------------------------------------------
# Parameter and state types


@dataclass(frozen=True)
class FamilyParams:
    """Parameters (alpha, beta, b) of the single-parameter family.

    Derived constants: ``c`` = 3 alpha / 2 (exponent coefficient in the
    sigma reconstruction) and ``e`` = -alpha beta^3 (the slope of rho at
    rho = 0); the Einstein constant is +-3 b^2 e depending on the sign
    of rho'.
    """

    alpha: float
    beta: float
    b: float = 1.0

    def __post_init__(self):
        if self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        if self.b == 0.0:
            raise ValueError("b must be nonzero")

    @property
    def c(self) -> float:
        return 1.5 * self.alpha

    @property
    def e(self) -> float:
        return -self.alpha * self.beta**3


@dataclass(frozen=True)
class WarpedState:
    """State (alpha, gamma, delta) = (alpha, alpha', alpha'') of the
    warped profile, with constants B != 0 and C (Ctilde = C/B).

    sigma^2 = B alpha^2 / gamma must be positive, so B and gamma carry
    the same sign.
    """

    alpha: float
    gamma: float
    delta: float
    B: float = 1.0
    C: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.gamma == 0.0:
            raise ValueError("gamma must be nonzero")
        if self.B == 0.0:
            raise ValueError("B must be nonzero")
        if self.B / self.gamma <= 0.0:
            raise ValueError(
                "B and gamma must have the same sign (sigma^2 = B alpha^2/gamma > 0)"
            )

    @property
    def ctilde(self) -> float:
        return self.C / self.B

    @property
    def sigma(self) -> float:
        return math.sqrt(self.B * self.alpha**2 / self.gamma)


@dataclass(frozen=True)
class Trajectory:
    """Ordered samples of an integrated profile.

    ``columns`` maps column name to a sample array; rho trajectories
    carry (rho, rho_prime, sigma) and warped trajectories
    (alpha, gamma, delta, sigma, A_integral).  ``termination`` is one of
    REACHED_T_MAX, BLOW_UP, SINGULAR_GAMMA.
    """

    t: np.ndarray
    columns: dict = field(default_factory=dict)
    dt: float = 0.0
    termination: str = REACHED_T_MAX
    blow_up_time: float | None = None

    def __getitem__(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class EndDiagnostics:
    """Fitted asymptotics of a single-parameter family trajectory."""

    rho_slope: float
    sigma_slope: float
    rho_limit: float
    inv_sigma_limit: float
    small_end: str  # "hyperbolic-type" or "undetermined"
    large_end: str  # "r2-end", "blow-up" or "undetermined"
    blow_up_time: float | None = None


# ---------------------------------------------------------------------------
# Pointwise Einstein residual systems
#
# Sign convention: every residual is (curvature side) - (A side), so the
# flat pair sigma = rho = 1 with A = 1 reports -1 on the four diagonal
# slots.  Component order:
#   [ (1,1), (2,2), (1,2), (1,3), (1,4), (2,3), (2,4), (3,3), (4,4), (3,4) ]


def einstein_residuals(d: DeformationPair, a_const: float, p) -> np.ndarray:
    """Residuals of the ten pointwise Einstein equations at p.

    Diagonal slots carry the sigma^2 / rho^2 prefactors of the equations;
    off-diagonal slots are the bare brackets (the frame Ricci components
    divided by 2 sigma^2, sigma rho and 2 rho^2 respectively), which
    vanish together with them.
    """
    sv, rv, sg, sh, rg, rh = d.log_data(p)
    s2, r2 = sv * sv, rv * rv
    kv = r2 / s2
    kh = s2 / r2

    common_s = sh[0, 0] + sh[1, 1] + kv * (sh[2, 2] + sh[3, 3]) - 2.0 * kv * (
        sg[2] ** 2 + sg[3] ** 2
    )
    common_r = (
        kh * (rh[0, 0] + rh[1, 1])
        + rh[2, 2]
        + rh[3, 3]
        - 2.0 * kh * (rg[0] ** 2 + rg[1] ** 2)
    )

    res = np.empty(10)
    for slot, (j, jp) in enumerate(((0, 1), (1, 0))):
        res[slot] = (
            s2
            * (
                common_s
                + 2.0 * rh[j, j]
                - 2.0 * rg[j] ** 2
                + 2.0 * sg[j] * rg[j]
                - 2.0 * sg[jp] * rg[jp]
            )
            - a_const
        )
    res[2] = rh[0, 1] + sg[0] * rg[1] + rg[0] * sg[1] - rg[0] * rg[1]
    slot = 3
    for j in (0, 1):
        for s in (2, 3):
            res[slot] = sh[j, s] + rh[j, s] + 2.0 * sg[s] * rg[j]
            slot += 1
    for slot, (s, sp) in enumerate(((2, 3), (3, 2)), start=7):
        res[slot] = (
            r2
            * (
                2.0 * sh[s, s]
                - 2.0 * sg[s] ** 2
                + 2.0 * sg[s] * rg[s]
                - 2.0 * sg[sp] * rg[sp]
                + common_r
            )
            - a_const
        )
    res[9] = sh[2, 3] + rg[2] * sg[3] + sg[2] * rg[3] - sg[2] * sg[3]
    return res


def _vertical_curvature(beta: ScalarField, p) -> float:
    """Gaussian curvature beta^2 (d33 + d44) ln beta of the vertical
    surface metric (dx3^2 + dx4^2)/beta^2 at p."""
    bv, _, bh = beta.log_jet(p)
    return bv * bv * (bh[2, 2] + bh[3, 3])


def warped_residuals(
    sigma: ScalarField,
    alpha: ScalarField,
    beta: ScalarField,
    a_const: float,
    p,
    curvature_tol: float = 1e-6,
) -> np.ndarray:
    """Residuals of the four warped-product Einstein equations at p.

    The metric is (dx1^2+dx2^2)/sigma^2 + (dx3^2+dx4^2)/(alpha^2 beta^2)
    with sigma, alpha functions of (x1, x2) and beta of (x3, x4); beta
    must give the vertical surface constant Gaussian curvature, which is
    checked on a small sample stencil around p.
    """
    p = np.asarray(p, dtype=float)
    ks = []
    for off in (0.0, 0.05, -0.05):
        for axis in (2, 3):
            q = p.copy()
            q[axis] += off
            ks.append(_vertical_curvature(beta, q))
    if max(ks) - min(ks) > curvature_tol:
        raise DomainError(
            f"beta does not have constant vertical curvature: spread {max(ks) - min(ks):.3e}"
        )

    sv, sg, sh = sigma.log_jet(p)
    av, ag, ah = alpha.log_jet(p)
    bv, _, bh = beta.log_jet(p)
    s2 = sv * sv
    lap_s = sh[0, 0] + sh[1, 1]

    res = np.empty(4)
    res[0] = (
        s2
        * (lap_s - 2.0 * ag[0] ** 2 + 2.0 * ah[0, 0] + 2.0 * sg[0] * ag[0] - 2.0 * sg[1] * ag[1])
        - a_const
    )
    res[1] = (
        s2
        * (lap_s - 2.0 * ag[1] ** 2 + 2.0 * ah[1, 1] + 2.0 * sg[1] * ag[1] - 2.0 * sg[0] * ag[0])
        - a_const
    )
    res[2] = ah[0, 1] + sg[0] * ag[1] + ag[0] * sg[1] - ag[0] * ag[1]
    res[3] = (
        s2 * (ah[0, 0] + ah[1, 1])
        + (av * bv) ** 2 * (bh[2, 2] + bh[3, 3])
        - 2.0 * s2 * (ag[0] ** 2 + ag[1] ** 2)
        - a_const
    )
    return res


def single_param_residuals(
    sigma: ScalarField, rho: ScalarField, a_const: float, t: float
) -> np.ndarray:
    """Residuals of the three scalar equations obtained by substituting
    sigma = sigma(t), rho = rho(t) into the ten-equation system:

        (1)  A = sigma^2 { (ln s)'' + 2 (ln s)'(ln r)' - 2 (ln r)'^2 + 2 (ln r)'' }
        (2)  A = sigma^2 { (ln s)'' - 2 (ln s)'(ln r)' }
        (3)  A = sigma^2 { (ln r)'' - 2 (ln r)'^2 }
    """
    p = (t, 0.0, 0.0, 0.0)
    sv, sg, sh = sigma.log_jet(p)
    _, rg, rh = rho.log_jet(p)
    s2 = sv * sv
    sd, sdd = sg[0], sh[0, 0]
    rd, rdd = rg[0], rh[0, 0]
    return np.array(
        [
            s2 * (sdd + 2.0 * sd * rd - 2.0 * rd * rd + 2.0 * rdd) - a_const,
            s2 * (sdd - 2.0 * sd * rd) - a_const,
            s2 * (rdd - 2.0 * rd * rd) - a_const,
        ]
    )


# ---------------------------------------------------------------------------
# RK4 and the warped first-order system


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def warped_rhs(s: WarpedState) -> np.ndarray:
    """Right-hand side (gamma, delta, 2 gamma delta/alpha + delta^2/gamma
    - 2 Ctilde gamma^2) of the warped first-order system."""
    if s.alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {s.alpha}")
    if s.gamma == 0.0:
        raise DomainError("gamma must be nonzero")
    return _warped_rhs_raw(np.array([s.alpha, s.gamma, s.delta]), s.ctilde)


def _warped_rhs_raw(y: np.ndarray, ctilde: float) -> np.ndarray:
    a, g, d = y
    return np.array([g, d, 2.0 * g * d / a + d * d / g - 2.0 * ctilde * g * g])


def warped_integral(s: WarpedState) -> float:
    """Conserved quantity A = C alpha^2 + (B alpha^2/gamma)
    (delta/alpha - 3 gamma^2/alpha^2) of the warped system."""
    if s.gamma == 0.0:
        raise DomainError("gamma must be nonzero")
    a, g, d = s.alpha, s.gamma, s.delta
    return s.C * a * a + (s.B * a * a / g) * (d / a - 3.0 * g * g / (a * a))


def integrate_warped(
    s0: WarpedState,
    dt: float,
    t_span: tuple[float, float] = (0.0, 1.0),
    cap: float = WARPED_COMPONENT_CAP,
    gamma_tol: float = GAMMA_SINGULAR_TOL,
) -> Trajectory:
    """RK4 trajectory of the warped system from state s0 over t_span.

    Halts with SINGULAR_GAMMA when |gamma| drops below ``gamma_tol`` (or
    gamma changes sign), with BLOW_UP when any component exceeds ``cap``
    in magnitude or turns non-finite.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    t0, t1 = t_span
    if t1 <= t0:
        raise ValueError(f"t_span must be increasing, got {t_span}")
    ctilde = s0.ctilde
    rhs = lambda y: _warped_rhs_raw(y, ctilde)
    sign0 = math.copysign(1.0, s0.gamma)

    y = np.array([s0.alpha, s0.gamma, s0.delta])
    t = t0
    ts, ys = [t], [y]
    termination = REACHED_T_MAX
    while t < t1 - 1e-12:
        step = min(dt, t1 - t)
        y_next = _rk4_step(rhs, y, step)
        if not np.all(np.isfinite(y_next)) or np.max(np.abs(y_next)) > cap:
            termination = BLOW_UP
            break
        if abs(y_next[1]) < gamma_tol or math.copysign(1.0, y_next[1]) != sign0:
            termination = SINGULAR_GAMMA
            break
        t += step
        y = y_next
        ts.append(t)
        ys.append(y)

    arr = np.array(ys)
    alpha, gamma, delta = arr[:, 0], arr[:, 1], arr[:, 2]
    sigma = np.sqrt(s0.B * alpha**2 / gamma)
    a_int = s0.C * alpha**2 + (s0.B * alpha**2 / gamma) * (
        delta / alpha - 3.0 * gamma**2 / alpha**2
    )
    return Trajectory(
        t=np.array(ts),
        columns={
            "alpha": alpha,
            "gamma": gamma,
            "delta": delta,
            "sigma": sigma,
            "A_integral": a_int,
        },
        dt=dt,
        termination=termination,
    )


# ---------------------------------------------------------------------------
# The single-parameter family rho' = alpha (rho^3 - beta^3)


def rho_rhs(fp: FamilyParams, rho: float) -> float:
    """Right-hand side alpha (rho^3 - beta^3) of the profile equation;
    equal to (2c/3) rho^3 + e with c = 3 alpha/2, e = -alpha beta^3."""
    return fp.alpha * (rho**3 - fp.beta**3)


def integrate_rho(
    fp: FamilyParams,
    rho0: float,
    dt: float,
    t_max: float,
    cap: float = RHO_BLOW_UP_CAP,
    t_tol: float = BLOW_UP_TIME_TOL,
) -> Trajectory:
    """RK4 trajectory of rho' = alpha (rho^3 - beta^3) from rho(0) = rho0.

    When |rho| exceeds ``cap`` the escape time is bracketed by repeated
    step halving from the last in-range state down to ``t_tol``; the
    accepted sub-steps are appended to the trajectory, so samples stay
    consistent with the equation all the way to the cap.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    f = lambda r: fp.alpha * (r**3 - fp.beta**3)

    t, rho = 0.0, float(rho0)
    ts, rhos = [t], [rho]
    termination = REACHED_T_MAX
    blow_up_time = None
    while t < t_max - 1e-12:
        step = min(dt, t_max - t)
        trial = _rk4_step(f, rho, step)
        if not math.isfinite(trial) or abs(trial) > cap:
            # refine: halve the step, keeping every in-range sub-step
            while step > t_tol:
                step *= 0.5
                trial = _rk4_step(f, rho, step)
                if math.isfinite(trial) and abs(trial) <= cap:
                    t += step
                    rho = trial
                    ts.append(t)
                    rhos.append(rho)
            termination = BLOW_UP
            blow_up_time = t + step
            break
        t += step
        rho = trial
        ts.append(t)
        rhos.append(rho)

    rho_arr = np.array(rhos)
    prime = fp.alpha * (rho_arr**3 - fp.beta**3)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where(
            prime != 0.0, fp.b * rho_arr * np.abs(prime) ** -0.5, np.nan
        )
    return Trajectory(
        t=np.array(ts),
        columns={"rho": rho_arr, "rho_prime": prime, "sigma": sigma},
        dt=dt,
        termination=termination,
        blow_up_time=blow_up_time,
    )


def implicit_time(rho: float) -> float:
    """Time at which the alpha = 1, beta = -1 trajectory from rho(0) = 0
    reaches the value ``rho``:

        t = (1/3) ln( (rho+1)/|rho^2 - rho + 1|^(1/2) )
            + (sqrt3/3) arctan( (2/sqrt3)(rho - 1/2) ) + pi sqrt3/18.

    Tends to 2 sqrt3 pi / 9 as rho -> infinity.
    """
    if rho < 0.0:
        raise ValueError(f"implicit_time requires rho >= 0, got {rho}")
    s3 = math.sqrt(3.0)
    quad = abs(rho * rho - rho + 1.0)
    return (
        math.log((rho + 1.0) / math.sqrt(quad)) / 3.0
        + (s3 / 3.0) * math.atan((2.0 / s3) * (rho - 0.5))
        + math.pi * s3 / 18.0
    )


def sigma_from_rho(fp: FamilyParams, rho: float, rho_prime: float) -> float:
    """sigma = b rho |rho'|^(-1/2); undefined at an equilibrium."""
    if rho_prime == 0.0:
        raise DomainError("sigma undefined at an equilibrium (rho' = 0)")
    return fp.b * rho / math.sqrt(abs(rho_prime))


def einstein_constant(fp: FamilyParams, rho_prime_sign: int) -> float:
    """Einstein constant of the family: -3 b^2 e when rho' > 0 and
    +3 b^2 e when rho' < 0 (so 3 b^2 alpha beta^3 on the rho' > 0 branch)."""
    if rho_prime_sign not in (1, -1):
        raise ValueError(f"rho_prime_sign must be +1 or -1, got {rho_prime_sign}")
    return -3.0 * rho_prime_sign * fp.b**2 * fp.e


# ---------------------------------------------------------------------------
# Assembling metric fields from trajectories


class _RhoInterpolant:
    """Cubic Hermite interpolation of rho(t) between trajectory samples.

    Only positions are interpolated; all derivatives at a query point
    come from the profile equation itself (rho' = alpha (rho^3 - beta^3),
    rho'' = 3 alpha rho^2 rho'), never from differencing the interpolant.
    """

    def __init__(self, traj: Trajectory):
        self.t = traj.t
        self.rho = traj["rho"]
        self.prime = traj["rho_prime"]
        if len(self.t) < 2:
            raise ValueError("trajectory must have at least two samples")

    @property
    def t_range(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def rho_at(self, t: float) -> float:
        t0, t1 = self.t_range
        if t < t0 or t > t1:
            raise DomainError(f"t = {t} outside trajectory range [{t0}, {t1}]")
        k = int(np.searchsorted(self.t, t, side="right") - 1)
        k = min(max(k, 0), len(self.t) - 2)
        h = self.t[k + 1] - self.t[k]
        u = (t - self.t[k]) / h
        h00 = (1.0 + 2.0 * u) * (1.0 - u) ** 2
        h10 = u * (1.0 - u) ** 2
        h01 = u * u * (3.0 - 2.0 * u)
        h11 = u * u * (u - 1.0)
        return float(
            h00 * self.rho[k]
            + h10 * h * self.prime[k]
            + h01 * self.rho[k + 1]
            + h11 * h * self.prime[k + 1]
        )


def family_fields(fp: FamilyParams, traj: Trajectory) -> tuple[ScalarField, ScalarField]:
    """(sigma, rho) profile fields backed by a rho trajectory.

    Derivatives run analytically through the profile equation:

        rho'   = alpha (rho^3 - beta^3)          rho''  = 3 alpha rho^2 rho'
        sigma  = b rho |rho'|^(-1/2)
        sigma' = b |rho'|^(-1/2) (rho' - c rho^3)
        sigma''= sigma c rho (c rho^3 - 2 rho')

    with c = 3 alpha / 2; the last two use (ln sigma)' = rho'/rho - c rho^2
    and (ln sigma)'' = -(rho'/rho)^2, which hold along any solution.
    """
    prime = traj["rho_prime"]
    if np.any(prime == 0.0):
        raise DomainError("trajectory touches an equilibrium (rho' = 0)")
    interp = _RhoInterpolant(traj)
    alpha, c, b = fp.alpha, fp.c, fp.b
    sgn = math.copysign(1.0, prime[0])

    def rho_val(t):
        return interp.rho_at(t)

    def rho_d1(t):
        r = interp.rho_at(t)
        return alpha * (r**3 - fp.beta**3)

    def rho_d2(t):
        r = interp.rho_at(t)
        return 3.0 * alpha * r * r * (alpha * (r**3 - fp.beta**3))

    def sigma_val(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return b * r / math.sqrt(sgn * f)

    def sigma_d1(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return b * (f - c * r**3) / math.sqrt(sgn * f)

    def sigma_d2(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return (b * r / math.sqrt(sgn * f)) * c * r * (c * r**3 - 2.0 * f)

    # Exact log-derivative closures: near the collapsed end rho' -> 0 the
    # quotient form f''/f - (f'/f)^2 cancels catastrophically while these
    # stay fully accurate ((ln sigma)'' = -(rho'/rho)^2 along solutions).
    def rho_log_d1(t):
        r = interp.rho_at(t)
        return alpha * (r**3 - fp.beta**3) / r

    def rho_log_d2(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return 3.0 * alpha * r * f - (f / r) ** 2

    def sigma_log_d1(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return f / r - c * r * r

    def sigma_log_d2(t):
        r = interp.rho_at(t)
        f = alpha * (r**3 - fp.beta**3)
        return -((f / r) ** 2)

    # the interpolant raises outside the trajectory range by itself
    rho_field = ProfileField(
        rho_val, rho_d1, rho_d2, positive=True,
        log_deriv1=rho_log_d1, log_deriv2=rho_log_d2,
    )
    sigma_field = ProfileField(
        sigma_val, sigma_d1, sigma_d2, positive=True,
        log_deriv1=sigma_log_d1, log_deriv2=sigma_log_d2,
    )
    return sigma_field, rho_field


def family_metric(fp: FamilyParams, traj: Trajectory) -> MetricField:
    """Deformed metric built from a family trajectory (requires rho' != 0
    throughout; queries outside the trajectory range raise)."""
    sigma_field, rho_field = family_fields(fp, traj)
    return metric_of(DeformationPair(sigma_field, rho_field))


def ricci_flat_fields(a: float = 1.0) -> tuple[ScalarField, ScalarField]:
    """Closed-form Ricci-flat profile on t > 0: sigma = a t^(1/4),
    rho = t^(-1/2) (the e = 0 member of the family)."""
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    sigma = ExpressionField(f"{a!r}*t^0.25", positive=True)
    rho = ExpressionField("t^-0.5", positive=True)
    return sigma, rho


def hyperbolic_fields() -> tuple[ScalarField, ScalarField]:
    """sigma = rho = t on t > 0: hyperbolic 4-space, Einstein with A = -3."""
    sigma = ExpressionField("t", positive=True)
    rho = ExpressionField("t", positive=True)
    return sigma, rho


# ---------------------------------------------------------------------------
# End diagnostics


def _fit_slope_through_origin(t: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(t, y) / np.dot(t, t))


def end_diagnostics(
    fp: FamilyParams,
    traj: Trajectory,
    small_window: float = 0.1,
    large_fraction: float = 0.1,
) -> EndDiagnostics:
    """Fitted small-t slopes of rho and sigma, large-t limits of rho and
    1/sigma, and an end classification.

    Small-t slopes are least-squares fits through the origin over
    samples with 0 < t <= ``small_window`` (the family starts at
    rho(0) = 0, where rho ~ e t and sigma ~ b sqrt(e) t).  Requires at
    least 10 samples in each regime.
    """
    t = traj.t
    rho = traj["rho"]
    sigma = traj["sigma"]

    small = (t > 0.0) & (t <= small_window)
    if int(np.sum(small)) < 10:
        raise ValueError(
            f"trajectory too short to fit: {int(np.sum(small))} samples with t <= {small_window}"
        )
    rho_slope = _fit_slope_through_origin(t[small], rho[small])
    sigma_slope = _fit_slope_through_origin(t[small], sigma[small])
    small_end = "hyperbolic-type" if rho_slope > 0.0 and sigma_slope > 0.0 else "undetermined"

    if traj.termination == BLOW_UP:
        return EndDiagnostics(
            rho_slope=rho_slope,
            sigma_slope=sigma_slope,
            rho_limit=float(rho[-1]),
            inv_sigma_limit=float(1.0 / sigma[-1]),
            small_end=small_end,
            large_end=BLOW_UP,
            blow_up_time=traj.blow_up_time,
        )

    t_end = t[-1]
    large = t >= (1.0 - large_fraction) * t_end
    if int(np.sum(large)) < 10:
        raise ValueError(
            f"trajectory too short to fit: {int(np.sum(large))} samples in the large-t regime"
        )
    rho_limit = float(rho[-1])
    inv_sigma_limit = float(1.0 / sigma[-1])
    settled = abs(traj["rho_prime"][-1]) < 1e-2 and abs(inv_sigma_limit) < 1e-2
    large_end = "r2-end" if settled else "undetermined"
    return EndDiagnostics(
        rho_slope=rho_slope,
        sigma_slope=sigma_slope,
        rho_limit=rho_limit,
        inv_sigma_limit=inv_sigma_limit,
        small_end=small_end,
        large_end=large_end,
        blow_up_time=None,
    )

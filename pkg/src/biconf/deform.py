"""Biconformal deformation of flat R^4 over the projection to the first
two coordinates, and its closed-form Ricci curvature.

The deformed metric is

    g = (dx1^2 + dx2^2) / sigma^2 + (dx3^2 + dx4^2) / rho^2

for positive scalar fields sigma, rho.  The adapted orthonormal frame is
e_i = sigma d_i (i = 1, 2, horizontal) and e_r = rho d_r (r = 3, 4,
vertical); all closed forms below produce frame components
Ric(e_a, e_b), and a single converter owns the sigma^2 / sigma*rho /
rho^2 factors back to coordinate components.

Throughout, s_a / s_ab denote first / second partials of ln(sigma) and
r_a / r_ab those of ln(rho), all with respect to the flat coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PositivityError, ScalarField, as_point
from .oracle import MetricField

__all__ = [
    "DeformationPair",
    "FrameRicci",
    "TransformationLaws",
    "metric_of",
    "ricci_horizontal",
    "ricci_mixed",
    "ricci_vertical",
    "ricci_frame",
    "frame_to_coords",
    "deformed_laplacian",
    "transformation_laws",
    "conformal_ricci_coords",
    "horizontal_commutator",
]


@dataclass(frozen=True)
class DeformationPair:
    """The (sigma, rho) pair defining the deformed metric.

    Positivity is enforced pointwise at every evaluation; callers own
    any domain restriction (e.g. the unit bidisc for the hyperbolic
    product example).
    """

    sigma: ScalarField
    rho: ScalarField

    @classmethod
    def from_exprs(cls, sigma_text: str, rho_text: str) -> "DeformationPair":
        from .fields import ExpressionField

        return cls(
            ExpressionField(sigma_text, positive=True),
            ExpressionField(rho_text, positive=True),
        )

    def log_data(self, p):
        """(sigma, rho, grad ln sigma, Hess ln sigma, grad ln rho, Hess ln rho)."""
        sv, sg, sh = self.sigma.log_jet(p)
        rv, rg, rh = self.rho.log_jet(p)
        if sv <= 0.0:
            raise PositivityError(f"sigma must be positive, got {sv}")
        if rv <= 0.0:
            raise PositivityError(f"rho must be positive, got {rv}")
        return sv, rv, sg, sh, rg, rh


@dataclass(frozen=True)
class FrameRicci:
    """Ricci components in the adapted orthonormal frame, as a 4x4 matrix.

    Rows/columns 0,1 are horizontal (e_1, e_2) and 2,3 vertical
    (e_3, e_4); symmetry holds by construction.
    """

    matrix: np.ndarray

    @property
    def hh(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def hv(self) -> np.ndarray:
        return self.matrix[:2, 2:]

    @property
    def vv(self) -> np.ndarray:
        return self.matrix[2:, 2:]


@dataclass(frozen=True)
class TransformationLaws:
    """Dilation, fibre mean curvature and integrability form of the
    deformed projection (coordinate components)."""

    dilation: float
    mean_curvature: np.ndarray  # (4,)
    integrability_form: np.ndarray  # (4,), identically zero here


def metric_of(d: DeformationPair) -> MetricField:
    """The deformed metric diag(1/sigma^2, 1/sigma^2, 1/rho^2, 1/rho^2)
    as a MetricField with analytic partial derivatives."""

    def value(p):
        sv = d.sigma(p)
        rv = d.rho(p)
        return np.diag([1.0 / sv**2, 1.0 / sv**2, 1.0 / rv**2, 1.0 / rv**2])

    def partials(p):
        sjet = d.sigma.jet(p)
        rjet = d.rho.jet(p)
        ds = -2.0 * sjet.g / sjet.val**3  # d_c (sigma^-2)
        dr = -2.0 * rjet.g / rjet.val**3
        dg = np.zeros((4, 4, 4))
        for c in range(4):
            dg[c, 0, 0] = dg[c, 1, 1] = ds[c]
            dg[c, 2, 2] = dg[c, 3, 3] = dr[c]
        return dg

    return MetricField(value, partials)


def ricci_horizontal(d: DeformationPair, p) -> np.ndarray:
    """Frame components Ric(e_i, e_j), i, j in {1, 2}, as a 2x2 matrix."""
    sv, rv, sg, sh, rg, rh = d.log_data(p)
    k = (rv / sv) ** 2
    common = sh[0, 0] + sh[1, 1] + k * (sh[2, 2] + sh[3, 3]) - 2.0 * k * (
        sg[2] ** 2 + sg[3] ** 2
    )
    s2 = sv * sv
    r11 = s2 * (
        common
        - 2.0 * rg[0] ** 2
        + 2.0 * rh[0, 0]
        + 2.0 * sg[0] * rg[0]
        - 2.0 * sg[1] * rg[1]
    )
    r22 = s2 * (
        common
        - 2.0 * rg[1] ** 2
        + 2.0 * rh[1, 1]
        + 2.0 * sg[1] * rg[1]
        - 2.0 * sg[0] * rg[0]
    )
    r12 = (
        2.0
        * s2
        * (rh[0, 1] - rg[0] * rg[1] + sg[0] * rg[1] + rg[0] * sg[1])
    )
    return np.array([[r11, r12], [r12, r22]])


def ricci_mixed(d: DeformationPair, p) -> np.ndarray:
    """Frame components Ric(e_j, e_s), j in {1, 2}, s in {3, 4}:

        Ric(e_j, e_s) = sigma*rho * { d^2 ln(sigma*rho)/dx_j dx_s
                                       + 2 (d ln sigma/dx_s)(d ln rho/dx_j) }
    """
    sv, rv, sg, sh, rg, rh = d.log_data(p)
    out = np.empty((2, 2))
    for jj, j in enumerate((0, 1)):
        for ss, s in enumerate((2, 3)):
            out[jj, ss] = sv * rv * (sh[j, s] + rh[j, s] + 2.0 * sg[s] * rg[j])
    return out


def ricci_vertical(d: DeformationPair, p) -> np.ndarray:
    """Frame components Ric(e_r, e_s), r, s in {3, 4}, as a 2x2 matrix."""
    sv, rv, sg, sh, rg, rh = d.log_data(p)
    k = (sv / rv) ** 2
    trace_br = (
        k * (rh[0, 0] + rh[1, 1])
        + rh[2, 2]
        + rh[3, 3]
        - 2.0 * k * (rg[0] ** 2 + rg[1] ** 2)
        - 2.0 * (sg[2] * rg[2] + sg[3] * rg[3])
    )
    r2 = rv * rv
    out = np.empty((2, 2))
    for rr, r in enumerate((2, 3)):
        for ss, s in enumerate((2, 3)):
            val = 2.0 * sh[r, s] + 2.0 * rg[r] * sg[s] + 2.0 * sg[r] * rg[s] - 2.0 * sg[
                r
            ] * sg[s]
            if r == s:
                val += trace_br
            out[rr, ss] = r2 * val
    return out


def ricci_frame(d: DeformationPair, p) -> FrameRicci:
    """All frame Ricci components assembled into a symmetric 4x4."""
    hh = ricci_horizontal(d, p)
    hv = ricci_mixed(d, p)
    vv = ricci_vertical(d, p)
    m = np.empty((4, 4))
    m[:2, :2] = hh
    m[:2, 2:] = hv
    m[2:, :2] = hv.T
    m[2:, 2:] = vv
    return FrameRicci(m)


def frame_to_coords(fr: FrameRicci, d: DeformationPair, p) -> np.ndarray:
    """Convert frame components to coordinate components.

    The basis change is d_i = e_i/sigma, d_r = e_r/rho, so the HH block
    divides by sigma^2, HV by sigma*rho and VV by rho^2.
    """
    sv = d.sigma(p)
    rv = d.rho(p)
    w = np.array([1.0 / sv, 1.0 / sv, 1.0 / rv, 1.0 / rv])
    return fr.matrix * np.outer(w, w)


def deformed_laplacian(d: DeformationPair, f: ScalarField, p) -> float:
    """Laplacian of f in the deformed metric, flat-base closed form:

        Lap f = sigma^2 Lap0 f + (rho^2 - sigma^2) LapV0 f
                - 2 sigma^2 df(Hgrad0 ln rho) - 2 rho^2 df(Vgrad0 ln sigma)

    where Lap0 is the flat Laplacian and LapV0 f = f_33 + f_44.
    """
    sv, rv, sg, _, rg, _ = d.log_data(p)
    jet = f.jet(p)
    lap0 = float(np.trace(jet.h))
    lap_v = jet.h[2, 2] + jet.h[3, 3]
    s2, r2 = sv * sv, rv * rv
    return float(
        s2 * lap0
        + (r2 - s2) * lap_v
        - 2.0 * s2 * (jet.g[0] * rg[0] + jet.g[1] * rg[1])
        - 2.0 * r2 * (jet.g[2] * sg[2] + jet.g[3] * sg[3])
    )


def transformation_laws(d: DeformationPair, p) -> TransformationLaws:
    """Dilation, mean curvature and integrability form of the deformed
    projection.  Over the flat base these specialize to

        dilation = sigma,   mu = sigma^2 (d1 ln rho, d2 ln rho, 0, 0),
        zeta = 0 (asserted: the base integrability form vanishes).
    """
    sv, _, _, _, rg, _ = d.log_data(p)
    mu = np.zeros(4)
    mu[0] = sv * sv * rg[0]
    mu[1] = sv * sv * rg[1]
    return TransformationLaws(sv, mu, np.zeros(4))


def conformal_ricci_coords(sigma: ScalarField, p) -> np.ndarray:
    """Coordinate Ricci of the conformal metric g = g0/sigma^2 (the
    sigma = rho case), from the classical conformal-change formula:

        Ric_ab = 2 [ (ln s)_ab + (ln s)_a (ln s)_b ]
                 + delta_ab ( Lap0 ln s - 2 |grad0 ln s|^2 )
    """
    _, sg, sh = sigma.log_jet(p)
    trace = float(np.trace(sh))
    norm2 = float(np.dot(sg, sg))
    return 2.0 * (sh + np.outer(sg, sg)) + np.eye(4) * (trace - 2.0 * norm2)


def horizontal_commutator(d: DeformationPair, p) -> np.ndarray:
    """Coordinate components of [e_1, e_2] for the deformed horizontal
    frame e_1 = sigma d_1, e_2 = sigma d_2:

        [e_1, e_2] = sigma (d_1 sigma) d_2 - sigma (d_2 sigma) d_1.

    Its vertical part (components 3, 4) vanishes identically, matching
    the vanishing integrability form of the projection.
    """
    as_point(p)
    sjet = d.sigma.jet(p)
    out = np.zeros(4)
    out[0] = -sjet.val * sjet.g[1]
    out[1] = sjet.val * sjet.g[0]
    return out

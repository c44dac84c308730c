"""Shared test utilities: random positive field corpus and FD checks."""

import numpy as np

from biconf import DeformationPair, ExpressionField


def random_point(rng, scale=0.4):
    return rng.uniform(-scale, scale, size=4)


def random_positive_expr(rng) -> str:
    """Expression text for a smooth strictly positive field on [-0.5, 0.5]^4.

    Either exp(quadratic) with modest coefficients, or a sum of squares
    plus a positive constant; both stay O(1) and positive on the box.
    """
    if rng.random() < 0.5:
        c0 = float(rng.uniform(-0.2, 0.2))
        lin = [float(v) for v in rng.uniform(-0.25, 0.25, size=4)]
        quad = rng.uniform(-0.08, 0.08, size=(4, 4))
        terms = [repr(c0)]
        terms += [f"{lin[i]!r}*x{i + 1}" for i in range(4)]
        terms += [
            f"{float(quad[i, j])!r}*x{i + 1}*x{j + 1}"
            for i in range(4)
            for j in range(i, 4)
        ]
        return "exp(" + " + ".join(terms) + ")"
    const = float(rng.uniform(0.9, 1.5))
    coeffs = [float(v) for v in rng.uniform(0.1, 0.5, size=4)]
    terms = [repr(const)] + [f"{coeffs[i]!r}*x{i + 1}^2" for i in range(4)]
    return "(" + " + ".join(terms) + ")/2"


def random_pair(rng) -> DeformationPair:
    return DeformationPair.from_exprs(random_positive_expr(rng), random_positive_expr(rng))


def fd_partial(func, p, i, h=1e-4):
    """Centered first difference of a scalar callable along axis i (0-based)."""
    e = np.zeros(4)
    e[i] = h
    p = np.asarray(p, dtype=float)
    return (func(p + e) - func(p - e)) / (2.0 * h)


def fd_partial2(func, p, i, j, h=1e-3):
    """Centered second difference along axes i, j (0-based)."""
    p = np.asarray(p, dtype=float)
    ei = np.zeros(4)
    ej = np.zeros(4)
    ei[i] = h
    ej[j] = h
    if i == j:
        return (func(p + ei) - 2.0 * func(p) + func(p - ei)) / (h * h)
    return (
        func(p + ei + ej) - func(p + ei - ej) - func(p - ei + ej) + func(p - ei - ej)
    ) / (4.0 * h * h)


def sphere_pair() -> DeformationPair:
    return DeformationPair.from_exprs("(1 + x1^2 + x2^2)/2", "(1 + x3^2 + x4^2)/2")


def hyperbolic_pair() -> DeformationPair:
    return DeformationPair.from_exprs("(1 - x1^2 - x2^2)/2", "(1 - x3^2 - x4^2)/2")

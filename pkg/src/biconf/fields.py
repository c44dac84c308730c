"""Scalar fields on R^4 with queryable first and second partial derivatives.

Three backings are provided:

* ``ExpressionField`` -- parsed expression, exact derivatives via jets;
* ``CallableField``   -- black-box function, centered finite differences
  (h = 1e-4 for first, 1e-3 for second partials);
* ``ProfileField``    -- function of t = x1 alone with caller-supplied
  value/derivative closures (used for ODE-generated profiles).

Fields are immutable after construction and safe to evaluate from any
thread.  A field constructed with ``positive=True`` raises
``PositivityError`` whenever an evaluation returns a non-positive value.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .expr import DomainError, Expr, Jet, eval_jet, eval_value, parse_expr

__all__ = [
    "PositivityError",
    "Point",
    "as_point",
    "ScalarField",
    "ExpressionField",
    "CallableField",
    "ProfileField",
    "constant_field",
]

Point = Sequence[float]


class PositivityError(DomainError):
    """A field declared positive evaluated to a non-positive value."""


def as_point(p: Point) -> np.ndarray:
    """Validate and convert a point of R^4 to a float array."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"point must have 4 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point coordinates must be finite, got {arr}")
    return arr


class ScalarField:
    """Base class: value plus exact-or-FD first and second partials."""

    def __init__(self, positive: bool = False):
        self.positive = positive

    # subclasses implement these two
    def _raw_value(self, p: np.ndarray) -> float:
        raise NotImplementedError

    def _raw_jet(self, p: np.ndarray) -> Jet:
        raise NotImplementedError

    def __call__(self, p: Point) -> float:
        arr = as_point(p)
        value = self._raw_value(arr)
        if self.positive and value <= 0.0:
            raise PositivityError(
                f"field must be positive, got {value} at {tuple(map(float, arr))}"
            )
        return value

    def eval(self, p: Point) -> float:
        return self(p)

    def jet(self, p: Point) -> Jet:
        jet = self._raw_jet(as_point(p))
        if self.positive and jet.val <= 0.0:
            raise PositivityError(
                f"field must be positive, got {jet.val} at {tuple(p)}"
            )
        return jet

    def partial(self, p: Point, i: int) -> float:
        """First partial with respect to x_i, i in 1..4."""
        if i not in (1, 2, 3, 4):
            raise ValueError(f"partial index must be in 1..4, got {i}")
        return float(self.jet(p).g[i - 1])

    def partial2(self, p: Point, i: int, j: int) -> float:
        """Second partial with respect to x_i and x_j, indices in 1..4."""
        if i not in (1, 2, 3, 4) or j not in (1, 2, 3, 4):
            raise ValueError(f"partial indices must be in 1..4, got {i}, {j}")
        return float(self.jet(p).h[i - 1, j - 1])

    def grad_ln(self, p: Point) -> np.ndarray:
        """Gradient of ln(f): component a is (d_a f)/f.  Requires f > 0."""
        jet = self.jet(p)
        if jet.val <= 0.0:
            raise DomainError(f"grad_ln requires a positive value, got {jet.val}")
        return jet.g / jet.val

    def log_jet(self, p: Point):
        """(f, grad ln f, Hessian of ln f) at p; requires f > 0."""
        jet = self.jet(p)
        if jet.val <= 0.0:
            raise DomainError(f"log_jet requires a positive value, got {jet.val}")
        lg = jet.g / jet.val
        lh = jet.h / jet.val - np.outer(lg, lg)
        return jet.val, lg, lh


class ExpressionField(ScalarField):
    """Field backed by a parsed expression; derivatives are exact."""

    def __init__(self, source: str | Expr, positive: bool = False):
        super().__init__(positive)
        self.ast = parse_expr(source) if isinstance(source, str) else source

    def _raw_value(self, p: np.ndarray) -> float:
        return eval_value(self.ast, p)

    def _raw_jet(self, p: np.ndarray) -> Jet:
        return eval_jet(self.ast, p)

    def __repr__(self):
        from .expr import pretty

        return f"ExpressionField({pretty(self.ast)!r})"


class CallableField(ScalarField):
    """Black-box field; derivatives by centered finite differences.

    ``h1`` is the step for first partials, ``h2`` for second partials.
    The FD Hessian is symmetric bitwise (each mixed entry is computed
    once and mirrored).
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], float],
        positive: bool = False,
        h1: float = 1e-4,
        h2: float = 1e-3,
    ):
        super().__init__(positive)
        self.func = func
        self.h1 = h1
        self.h2 = h2

    def _raw_value(self, p: np.ndarray) -> float:
        return float(self.func(p))

    def _raw_jet(self, p: np.ndarray) -> Jet:
        f = self.func
        h1, h2 = self.h1, self.h2
        value = float(f(p))
        g = np.zeros(4)
        for a in range(4):
            e = np.zeros(4)
            e[a] = h1
            g[a] = (f(p + e) - f(p - e)) / (2.0 * h1)
        h = np.zeros((4, 4))
        for a in range(4):
            e = np.zeros(4)
            e[a] = h2
            h[a, a] = (f(p + e) - 2.0 * value + f(p - e)) / (h2 * h2)
        for a in range(4):
            for b in range(a + 1, 4):
                ea = np.zeros(4)
                eb = np.zeros(4)
                ea[a] = h2
                eb[b] = h2
                mixed = (
                    f(p + ea + eb) - f(p + ea - eb) - f(p - ea + eb) + f(p - ea - eb)
                ) / (4.0 * h2 * h2)
                h[a, b] = mixed
                h[b, a] = mixed
        return Jet(value, g, h)


class ProfileField(ScalarField):
    """Field depending on t = x1 only, with supplied derivative closures.

    ``domain`` restricts t to the open interval (lo, hi); use ``None``
    for an unbounded side.  When the caller can evaluate (ln f)' and
    (ln f)'' in closed form, passing ``log_deriv1``/``log_deriv2``
    sidesteps the cancellation in f''/f - (f'/f)^2 for profiles whose
    log-derivatives are many orders smaller than the quotient terms.
    """

    def __init__(
        self,
        value: Callable[[float], float],
        deriv1: Callable[[float], float],
        deriv2: Callable[[float], float],
        domain: tuple[float | None, float | None] = (None, None),
        positive: bool = False,
        log_deriv1: Callable[[float], float] | None = None,
        log_deriv2: Callable[[float], float] | None = None,
    ):
        super().__init__(positive)
        self.value_fn = value
        self.deriv1_fn = deriv1
        self.deriv2_fn = deriv2
        self.domain = domain
        self.log_deriv1_fn = log_deriv1
        self.log_deriv2_fn = log_deriv2

    def log_jet(self, p):
        if self.log_deriv1_fn is None or self.log_deriv2_fn is None:
            return super().log_jet(p)
        q = as_point(p)
        t = q[0]
        self._check_domain(t)
        value = float(self.value_fn(t))
        if value <= 0.0:
            raise DomainError(f"log_jet requires a positive value, got {value}")
        lg = np.zeros(4)
        lg[0] = self.log_deriv1_fn(t)
        lh = np.zeros((4, 4))
        lh[0, 0] = self.log_deriv2_fn(t)
        return value, lg, lh

    def _check_domain(self, t: float) -> None:
        lo, hi = self.domain
        if lo is not None and t <= lo:
            raise DomainError(f"profile defined for t > {lo}, got t = {t}")
        if hi is not None and t >= hi:
            raise DomainError(f"profile defined for t < {hi}, got t = {t}")

    def _raw_value(self, p: np.ndarray) -> float:
        t = p[0]
        self._check_domain(t)
        return float(self.value_fn(t))

    def _raw_jet(self, p: np.ndarray) -> Jet:
        t = p[0]
        self._check_domain(t)
        g = np.zeros(4)
        g[0] = self.deriv1_fn(t)
        h = np.zeros((4, 4))
        h[0, 0] = self.deriv2_fn(t)
        return Jet(float(self.value_fn(t)), g, h)


def constant_field(value: float, positive: bool = False) -> ScalarField:
    """Field identically equal to ``value``."""
    from .expr import Num

    return ExpressionField(Num(float(value)), positive=positive)

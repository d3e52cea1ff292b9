"""Elements of pi_n(gamma1, gamma2) and the generalized derivative on them.

An element of degree ``n`` is a coefficient vector ``c`` with
``f = sum_k c[k] gamma1^(n-k) gamma2^k``. The generalized derivative acts on
these vectors through a sparse matrix (see :class:`DerivativeRule`), so
repeated derivatives are exact: no numerical differentiation is nested.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from . import _kernels
from .errors import (
    DegreeError,
    MismatchedSystemError,
    NumericError,
    UnsupportedOperationError,
)
from .gamma_system import GammaSystem, HomPoint, format_scalar, wronskian

FD_STEP = 1e-6
QUAD_TOL = 1e-10


def _coeff_array(values, exact: bool):
    if exact:
        return np.array([v if isinstance(v, Fraction) else Fraction(v) for v in values], dtype=object)
    return np.array([float(v) for v in values], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class PiElement:
    sys: GammaSystem
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.degree < 0:
            raise DegreeError("degree must be non-negative")
        if len(self.coeffs) != self.degree + 1:
            raise DegreeError(f"expected {self.degree + 1} coefficients, got {len(self.coeffs)}")
        arr = _coeff_array(self.coeffs, self.sys.exact)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def from_coeffs(cls, sys: GammaSystem, coeffs: Sequence) -> "PiElement":
        coeffs = [sys.scalar(c) for c in coeffs]
        return cls(sys, len(coeffs) - 1, coeffs)

    # -- evaluation -----------------------------------------------------
    def __call__(self, t):
        return evaluate(self, t)

    def eval_many(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=object if self.sys.exact else np.float64)
        g1 = np.broadcast_to(self.sys.gamma1(ts), ts.shape)
        g2 = np.broadcast_to(self.sys.gamma2(ts), ts.shape)
        if not self.sys.exact:
            g1 = np.ascontiguousarray(g1, dtype=np.float64)
            g2 = np.ascontiguousarray(g2, dtype=np.float64)
        return _kernels.run_pi_eval_grid(self.coeffs, g1, g2)

    def classical_derivative(self, t):
        """Ordinary d/dt by the chain rule on gamma1, gamma2."""
        s = self.sys
        t = s.check_domain(s.scalar(t))
        a, b = s.gamma1(t), s.gamma2(t)
        ap, bp = s.gamma1_prime(t), s.gamma2_prime(t)
        n = self.degree
        total = s.zero()
        for k, c in enumerate(self.coeffs):
            i, j = n - k, k
            if i:
                total += c * i * a ** (i - 1) * ap * b ** j
            if j:
                total += c * j * a ** i * b ** (j - 1) * bp
        return total

    # -- algebra --------------------------------------------------------
    def _check(self, other: "PiElement"):
        if other.sys != self.sys:
            raise MismatchedSystemError(f"{self.sys.name} vs {other.sys.name}")

    def __add__(self, other: "PiElement") -> "PiElement":
        self._check(other)
        n = max(self.degree, other.degree)
        a, b = elevate(self, n), elevate(other, n)
        return PiElement(self.sys, n, a.coeffs + b.coeffs)

    def __neg__(self) -> "PiElement":
        return PiElement(self.sys, self.degree, -self.coeffs)

    def __sub__(self, other: "PiElement") -> "PiElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiElement):
            return multiply(self, other)
        return PiElement(self.sys, self.degree, self.coeffs * self.sys.scalar(other))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [format_scalar(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, sys: GammaSystem, data: dict) -> "PiElement":
        coeffs = data["coeffs"]
        if "degree" in data and int(data["degree"]) != len(coeffs) - 1:
            raise DegreeError("degree does not match number of coefficients")
        return cls.from_coeffs(sys, coeffs)

    def __repr__(self):
        return f"PiElement({self.sys.name}, degree={self.degree}, coeffs={list(self.coeffs)})"


# ---------------------------------------------------------------------------
# constructors


def constant(sys: GammaSystem, value=1) -> PiElement:
    """Degree-0 element with the given value."""
    return PiElement(sys, 0, [sys.scalar(value)])


def zero(sys: GammaSystem, degree: int = 0) -> PiElement:
    return PiElement(sys, degree, [sys.zero()] * (degree + 1))


def unit_element(sys: GammaSystem, degree: int = 1) -> PiElement:
    """The function 1 written in pi_degree of a unital system."""
    if not sys.is_unital:
        raise UnsupportedOperationError(f"{sys.name} does not contain the constant function")
    one = PiElement(sys, 1, list(sys.unit_coeffs))
    out = PiElement(sys, 0, [sys.one()])
    for _ in range(degree):
        out = multiply(out, one)
    return out


def kernel_element(sys: GammaSystem, a) -> PiElement:
    """``d(a, .)`` as a degree-1 element."""
    return multiply_linear_factor(constant(sys, 1), sys.curve_point(a))


def elevate(f: PiElement, degree: int) -> PiElement:
    """Rewrite ``f`` in a higher-degree space via a unit factor."""
    if degree < f.degree:
        raise DegreeError(f"cannot lower degree {f.degree} to {degree}")
    if degree == f.degree:
        return f
    s = f.sys
    if s.is_unital:
        return multiply(f, unit_element(s, degree - f.degree))
    if s.derivative_rule in ("trig", "hyperbolic") and (degree - f.degree) % 2 == 0:
        # cos^2 + sin^2 = 1 and cosh^2 - sinh^2 = 1
        sign = 1.0 if s.derivative_rule == "trig" else -1.0
        quad = PiElement(s, 2, [1.0, 0.0, sign])
        out = f
        for _ in range((degree - f.degree) // 2):
            out = multiply(out, quad)
        return out
    if f.is_zero():
        return zero(s, degree)
    raise UnsupportedOperationError(f"cannot embed pi_{f.degree} into pi_{degree} for {s.name}")


# ---------------------------------------------------------------------------
# operations


def evaluate(f: PiElement, t):
    s = f.sys
    t = s.check_domain(s.scalar(t))
    a, b = s.gamma1(t), s.gamma2(t)
    n = f.degree
    total = s.zero()
    pb = s.one()
    for k, c in enumerate(f.coeffs):
        total += c * a ** (n - k) * pb
        pb = pb * b
    return total


def multiply(f: PiElement, g: PiElement) -> PiElement:
    f._check(g)
    return PiElement(f.sys, f.degree + g.degree, np.convolve(f.coeffs, g.coeffs))


def multiply_linear_factor(f: PiElement, p: HomPoint) -> PiElement:
    """Element for ``t -> (p.x gamma2(t) - p.w gamma1(t)) f(t)``."""
    s = f.sys
    x, w = s.scalar(p.x), s.scalar(p.w)
    n = f.degree
    out = [s.zero()] * (n + 2)
    for k, c in enumerate(f.coeffs):
        out[k] -= w * c
        out[k + 1] += x * c
    return PiElement(s, n + 1, out)


def power(f: PiElement, k: int) -> PiElement:
    out = constant(f.sys, 1)
    for _ in range(k):
        out = multiply(out, f)
    return out


def psi_element(sys: GammaSystem, points: Sequence[HomPoint]) -> PiElement:
    """``prod_i (x_i gamma2 - w_i gamma1)``."""
    out = constant(sys, 1)
    for p in points:
        out = multiply_linear_factor(out, p)
    return out


# ---------------------------------------------------------------------------
# generalized derivative


class DerivativeRule:
    """Linear action of D on the monomials ``gamma1^a gamma2^b``.

    For a unital system ``D gamma1 = -c2`` and ``D gamma2 = c1``, so each
    monomial drops one degree. For (cos, sin) and (cosh, sinh) the degree is
    preserved.
    """

    def __init__(self, sys: GammaSystem):
        if sys.derivative_rule is None:
            raise UnsupportedOperationError(
                f"{sys.name} has no closed-form derivative inside pi_n; use gen_derivative_numeric"
            )
        self.sys = sys
        self.kind = sys.derivative_rule

    def image_degree(self, n: int) -> int:
        if self.kind == "unital":
            return max(n - 1, 0)
        return n

    def image(self, a: int, b: int) -> PiElement:
        n = a + b
        col = np.zeros(n + 1, dtype=object if self.sys.exact else np.float64)
        col[b] = 1
        return PiElement(self.sys, self.image_degree(n), self.matrix(n) @ col)

    def matrix(self, n: int) -> np.ndarray:
        return _derivative_matrix(self.sys, n)


@lru_cache(maxsize=256)
def _derivative_matrix(sys: GammaSystem, n: int) -> np.ndarray:
    kind = sys.derivative_rule
    exact = sys.exact
    rows = max(n - 1, 0) + 1 if kind == "unital" else n + 1
    m = np.zeros((rows, n + 1), dtype=object if exact else np.float64)
    if exact:
        m[:] = Fraction(0)
    for k in range(n + 1):
        a, b = n - k, k
        if kind == "unital":
            if n == 0:
                continue
            c1, c2 = sys.unit_coeffs
            # a * gamma1^(a-1) gamma2^b * (-c2)  +  b * gamma1^a gamma2^(b-1) * c1
            if a:
                m[k, k] += -a * c2
            if b:
                m[k - 1, k] += b * c1
        else:
            sa = -1 if kind == "trig" else 1
            if a:
                m[k + 1, k] += sa * a
            if b:
                m[k - 1, k] += b
    m.setflags(write=False)
    return m


def gen_derivative(f: PiElement, order: int = 1) -> PiElement:
    if order < 0:
        raise DegreeError("order must be non-negative; use gen_antiderivative")
    rule = DerivativeRule(f.sys)
    out = f
    for _ in range(order):
        coeffs = rule.matrix(out.degree) @ out.coeffs
        out = PiElement(f.sys, rule.image_degree(out.degree), coeffs)
    return out


def gen_derivative_numeric(
    sys: GammaSystem,
    f: Callable,
    x,
    order: int = 1,
    fprime: Optional[Callable] = None,
):
    """``D f(x)`` for a plain function: ``f'(x) / W(x)``.

    ``fprime`` supplies the classical derivative; without it a central
    difference with step ``FD_STEP`` is used.
    """
    x = sys.check_domain(sys.scalar(x))
    if order == 0:
        return f(x)
    if order != 1:
        raise UnsupportedOperationError("numeric path supports order 0 or 1 only")
    if fprime is not None:
        slope = fprime(x)
    else:
        h = FD_STEP
        slope = (f(x + h) - f(x - h)) / (2 * h)
    return slope / wronskian(sys, x)


def limit_quotient(sys: GammaSystem, f: Callable, x0, h):
    """``(f(x0 + h) - f(x0)) / d(x0, x0 + h)``, the defining difference quotient."""
    x1 = x0 + h
    d = sys.gamma1(x0) * sys.gamma2(x1) - sys.gamma1(x1) * sys.gamma2(x0)
    return (f(x1) - f(x0)) / d


def _solve_particular(m: np.ndarray, rhs: np.ndarray) -> list:
    """One solution of an underdetermined full-row-rank system (free vars = 0)."""
    rows, cols = m.shape
    aug = [list(m[i]) + [rhs[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = max(range(r, rows), key=lambda i: abs(aug[i][c]))
        if aug[piv][c] == 0 or abs(aug[piv][c]) < 1e-300:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [v / p for v in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                fct = aug[i][c]
                aug[i] = [vi - fct * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if r < rows:
        raise NumericError("derivative map is not surjective on this degree")
    zero_ = rhs[0] - rhs[0]
    sol = [zero_] * cols
    for i, c in enumerate(pivots):
        sol[c] = aug[i][cols]
    return sol


def gen_antiderivative(f: PiElement, anchor) -> PiElement:
    """``F`` in pi_(n+1) with ``D F = f`` and ``F(anchor) = 0`` (unital systems)."""
    s = f.sys
    if not s.is_unital:
        raise UnsupportedOperationError(
            f"{s.name} is not unital; use gen_antiderivative_numeric"
        )
    m = _derivative_matrix(s, f.degree + 1)
    sol = _solve_particular(m, f.coeffs)
    F = PiElement(s, f.degree + 1, sol)
    shift = evaluate(F, anchor)
    return F - unit_element(s, F.degree) * shift


def gen_antiderivative_numeric(sys: GammaSystem, H: Callable, anchor, order: int = 1) -> Callable:
    """Return ``x -> D^{-order} H (x)``, vanishing to the given order at ``anchor``.

    One fold is ``int_anchor^x H(t) W(t) dt``. For unital systems ``D_x d(t, x) = 1``,
    which gives the Cauchy form ``int H(t) W(t) d(t, x)^(order-1) / (order-1)! dt``;
    other systems integrate fold by fold.
    """
    if order < 0:
        raise DegreeError("order must be non-negative")
    anchor = float(sys.check_domain(sys.scalar(anchor)))
    if order == 0:
        return H

    def W(t):
        return float(sys.gamma1(t) * sys.gamma2_prime(t) - sys.gamma1_prime(t) * sys.gamma2(t))

    def quad(fn, lo, hi):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(fn, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
            except integrate.IntegrationWarning as exc:
                raise NumericError(f"quadrature did not converge: {exc}") from exc
        if err > 10 * max(QUAD_TOL, QUAD_TOL * abs(val)):
            raise NumericError("quadrature error above tolerance", achieved=err)
        return val

    if sys.is_unital:
        fact = math.factorial(order - 1)

        def F(x):
            x = float(x)
            g1x, g2x = float(sys.gamma1(x)), float(sys.gamma2(x))

            def integrand(t):
                dtx = float(sys.gamma1(t)) * g2x - g1x * float(sys.gamma2(t))
                return H(t) * W(t) * dtx ** (order - 1) / fact

            return quad(integrand, anchor, x)

        return F

    inner = gen_antiderivative_numeric(sys, H, anchor, order - 1)

    def F(x):
        return quad(lambda t: inner(t) * W(t), anchor, float(x))

    return F


def taylor_expand(sys: GammaSystem, derivs: Sequence, x0, x):
    """``sum_k derivs[k] / k! * d(x0, x)^k`` (unital systems only)."""
    if not sys.is_unital:
        raise UnsupportedOperationError("the generalized Taylor formula needs 1 in span{gamma1, gamma2}")
    x0 = sys.check_domain(sys.scalar(x0))
    x = sys.check_domain(sys.scalar(x))
    dd = sys.gamma1(x0) * sys.gamma2(x) - sys.gamma1(x) * sys.gamma2(x0)
    total = sys.zero()
    term = sys.one()
    for k, v in enumerate(derivs):
        if k:
            term = term * dd / k
        total += sys.scalar(v) * term
    return total


def taylor_derivatives(f: PiElement, x0, n: int) -> list:
    """Exact ``D^k f(x0)`` for ``k = 0..n``."""
    out = []
    g = f
    for k in range(n + 1):
        out.append(evaluate(g, x0))
        if k < n:
            g = gen_derivative(g, 1)
    return out


def taylor_bound_check(f: PiElement, x0, n: int, ts) -> float:
    """Largest ratio ``|f - T_n f| / (max|D^(n+1) f| |d|^(n+1) / (n+1)!)`` on ``ts``.

    A value at most 1 is consistent with the Lagrange-type remainder.
    """
    s = f.sys
    derivs = taylor_derivatives(f, x0, n)
    dn1 = gen_derivative(f, n + 1)
    ts = list(ts)
    bound_d = max(abs(float(evaluate(dn1, t))) for t in ts + [x0])
    worst = 0.0
    for t in ts:
        resid = abs(float(evaluate(f, t) - taylor_expand(s, derivs, x0, t)))
        dd = abs(float(s.gamma1(x0) * s.gamma2(t) - s.gamma1(t) * s.gamma2(x0)))
        bound = bound_d * dd ** (n + 1) / math.factorial(n + 1)
        if bound > 0:
            worst = max(worst, resid / bound)
        elif resid > 1e-12:
            worst = math.inf
    return worst

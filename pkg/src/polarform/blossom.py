"""Homogeneous and extended blossoms over pi_n(gamma1, gamma2).

``hom_blossom`` is the constructive formula

    g(p_1..p_m) = sum_j (-1)^(m-j) / m! * D^j Psi(tau) * D^(m-j) G(tau),
    Psi(t) = prod_i (x_i gamma2(t) - w_i gamma1(t)),

evaluated exactly on coefficient vectors. Positive and scaled extended
blossoms are signed sums of ``hom_blossom`` over (subset, multiset) index
collections; the negative order blossom is a divided difference of
``Psi`` times a repeated antiderivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .combinatorics import gen_binomial, multisets, signed_term_count, subsets
from .divided_difference import Evaluand, FunctionEvaluand, PiEvaluand, divdiff
from .errors import (
    DegreeError,
    DomainError,
    OrderError,
    ResourceError,
    UnsupportedOperationError,
)
from .gamma_system import GammaSystem, HomPoint
from .pi_space import (
    PiElement,
    evaluate,
    gen_antiderivative,
    gen_antiderivative_numeric,
    gen_derivative,
    psi_element,
)
from .reports import IdentityReport

TERM_CAP = 10**6
CURVE_TOL = 1e-12


@dataclass(frozen=True)
class BlossomQuery:
    """Two parameter blocks ``(x, w)`` / ``(u, v)``, optionally tied to nodes.

    When ``u_nodes`` is given, ``u_block[i]`` must be the curve point of
    ``u_nodes[i]``; ``from_nodes`` builds such a query.
    """

    x_block: tuple
    u_block: tuple = ()
    u_nodes: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "x_block", tuple(self.x_block))
        object.__setattr__(self, "u_block", tuple(self.u_block))
        if self.u_nodes is not None:
            object.__setattr__(self, "u_nodes", tuple(self.u_nodes))
            if len(self.u_nodes) != len(self.u_block):
                raise ValueError("u_nodes and u_block differ in length")

    @classmethod
    def from_nodes(cls, sys: GammaSystem, x_block: Sequence[HomPoint], u_nodes: Sequence) -> "BlossomQuery":
        nodes = tuple(sys.scalar(e) for e in u_nodes)
        return cls(tuple(x_block), tuple(sys.curve_point(e) for e in nodes), nodes)

    @property
    def m(self) -> int:
        return len(self.x_block)

    @property
    def n(self) -> int:
        return len(self.u_block)

    @property
    def order(self) -> int:
        return self.m - self.n

    def validate(self, sys: GammaSystem):
        if self.u_nodes is None:
            return
        for e, p in zip(self.u_nodes, self.u_block):
            c = sys.curve_point(e)
            if abs(c.x - p.x) > CURVE_TOL or abs(c.w - p.w) > CURVE_TOL:
                raise ValueError(f"u point {p} is not the curve point of node {e}")


def default_tau(sys: GammaSystem):
    a, b = sys.domain
    return (a + b) / 2


# ---------------------------------------------------------------------------
# homogeneous blossom


class _HomBlossom:
    """Caches ``D^i G(tau)`` so that many point sets can share one ``G``."""

    def __init__(self, G: PiElement, m: int, tau=None):
        if G.degree > m:
            raise DegreeError(f"element of degree {G.degree} has no {m}-argument blossom")
        self.sys = G.sys
        self.m = m
        self.tau = self.sys.scalar(default_tau(self.sys) if tau is None else tau)
        self.g_derivs = []
        g = G
        for i in range(m + 1):
            self.g_derivs.append(evaluate(g, self.tau))
            if i < m:
                g = gen_derivative(g, 1)
        self.fact = math.factorial(m)

    def __call__(self, points: Sequence[HomPoint]):
        m = self.m
        if len(points) != m:
            raise DegreeError(f"expected {m} points, got {len(points)}")
        psi = psi_element(self.sys, points)
        total = self.sys.zero()
        for j in range(m + 1):
            sign = -1 if (m - j) % 2 else 1
            total += sign * evaluate(psi, self.tau) * self.g_derivs[m - j]
            if j < m:
                psi = gen_derivative(psi, 1)
        return total / self.fact


def hom_blossom(G: PiElement, pts: Sequence[HomPoint], tau=None):
    """Value of the ``len(pts)``-argument homogeneous blossom of ``G``."""
    return _HomBlossom(G, len(pts), tau)(list(pts))


# ---------------------------------------------------------------------------
# extended blossoms of positive order


def _signed_sum(G: PiElement, q: BlossomQuery, d: int, tau, homogeneous, term_cap):
    sys = G.sys
    m, n = q.m, q.n
    count = signed_term_count(m, n, d)
    if count > term_cap:
        raise ResourceError(f"{count} terms exceed the cap of {term_cap}")
    if homogeneous is None:
        homogeneous = sys.is_unital
    if homogeneous:
        lx = [sys.unit_functional(p) for p in q.x_block]
        lu = [sys.unit_functional(p) for p in q.u_block]
        if any(v == 0 for v in lu):
            raise DomainError("u parameters need c1 u + c2 v != 0 in the homogenized form")
        lu_all = sys.one()
        for v in lu:
            lu_all = lu_all * v
    blossom = _HomBlossom(G, d, tau)
    total = sys.zero()
    for alpha in range(0, min(m, d) + 1):
        beta = d - alpha
        if n == 0 and beta > 0:
            continue
        sign = -1 if beta % 2 else 1
        for I in subsets(m, alpha):
            chosen = [q.x_block[i] for i in I]
            if homogeneous:
                wx = sys.one()
                for i in range(m):
                    if i not in I:
                        wx = wx * lx[i]
            for J in multisets(n, beta):
                val = blossom(chosen + [q.u_block[j] for j in J])
                if homogeneous:
                    wu = lu_all
                    for j in J:
                        wu = wu * lu[j]
                    val = val * wx / wu
                total += sign * val
    return total


def ext_blossom_pos(G: PiElement, q: BlossomQuery, tau=None, homogeneous=None, term_cap: int = TERM_CAP):
    """Extended blossom of order ``k = m - n >= deg G``.

    Sum of ``(-1)^beta g(x_I, u_J)`` over distinct ``I`` and non-decreasing
    ``J`` with ``|I| + |J| = k``. With ``homogeneous`` (default for unital
    systems) each term is weighted by ``prod_{i not in I} l(x_i) /
    (prod_{j in J} l(u_j) * prod_j l(u_j))`` where ``l = c1 x + c2 w``; the
    weights are 1 on curve points and make the result linear (not just
    affine) in every ``x`` slot.
    """
    k = q.order
    if k < 0:
        raise OrderError("negative order; use ext_blossom_neg")
    if k < G.degree:
        raise OrderError(f"order {k} is below the degree {G.degree}")
    return _signed_sum(G, q, k, tau, homogeneous, term_cap)


def ext_blossom_scaled(
    G: PiElement, q: BlossomQuery, d: int, tau=None, homogeneous=None, term_cap: int = TERM_CAP
):
    """Signed ``d``-argument sum divided by the generalized binomial ``C(k, d)``."""
    if d < G.degree:
        raise DegreeError(f"d={d} is below the degree {G.degree}")
    binom = gen_binomial(q.order, d)
    if binom == 0:
        raise UnsupportedOperationError(f"C({q.order}, {d}) vanishes; the scaled formula is undefined")
    total = _signed_sum(G, q, d, tau, homogeneous, term_cap)
    return total / (binom if G.sys.exact else float(binom))


# ---------------------------------------------------------------------------
# negative order


def _antiderivative_chain(H: PiElement, r: int, anchor) -> PiElement:
    A = H
    for _ in range(r):
        A = gen_antiderivative(A, anchor)
    return A


def ext_blossom_neg(H, q: BlossomQuery, anchor=None, path: str = "auto"):
    """Extended blossom of order ``m - n < 0``.

    ``{ r! Psi(x) D^{-r} H(x) }[e_1, ..., e_n]`` with ``r = n - m - 1``.
    ``path="exact"`` needs a unital system and ``H`` in pi; ``"numeric"``
    uses quadrature antiderivatives and accepts an :class:`Evaluand` whose
    derivative oracle reaches the multiplicities of the nodes.
    """
    m, n = q.m, q.n
    if m >= n:
        raise OrderError("order is not negative; use ext_blossom_pos")
    if q.u_nodes is None:
        raise ValueError("negative order blossoms need the u_nodes of the u block")
    r = n - m - 1
    if isinstance(H, PiElement):
        sys = H.sys
    elif isinstance(H, Evaluand) and hasattr(H, "sys"):
        sys = H.sys
    else:
        raise TypeError("H must be a PiElement or an Evaluand carrying .sys")
    q.validate(sys)
    if anchor is None:
        anchor = q.u_nodes[0]
    anchor = sys.scalar(anchor)
    psi = psi_element(sys, q.x_block)
    if path == "auto":
        path = "exact" if isinstance(H, PiElement) and sys.is_unital else "numeric"
    if path == "exact":
        if not isinstance(H, PiElement):
            raise UnsupportedOperationError("exact path needs H as a PiElement")
        if not sys.is_unital:
            raise UnsupportedOperationError("exact antiderivatives need a unital system")
        F = (psi * _antiderivative_chain(H, r, anchor)) * math.factorial(r)
        return divdiff(sys, F, list(q.u_nodes))
    if isinstance(H, PiElement):
        H = pi_function_evaluand(H)
    F = _numeric_product(sys, psi, H, r, anchor)
    return divdiff(sys, F, list(q.u_nodes))


class SystemFunctionEvaluand(FunctionEvaluand):
    def __init__(self, sys, func, derivs=None, max_order=0):
        super().__init__(func, derivs, max_order)
        self.sys = sys


def pi_function_evaluand(H: PiElement) -> SystemFunctionEvaluand:
    """Wrap an element as a plain function with an exact derivative oracle."""
    ev = PiEvaluand(H)
    return SystemFunctionEvaluand(H.sys, ev.value, ev.deriv, max_order=10**9)


def _numeric_product(sys, psi: PiElement, H, r: int, anchor) -> SystemFunctionEvaluand:
    folds = {i: gen_antiderivative_numeric(sys, H.value, anchor, order=i) for i in range(1, r + 1)}
    fact = math.factorial(r)
    psi_ev = PiEvaluand(psi)

    def anti(x, i):
        # D^i applied to the r-fold antiderivative
        if i < r:
            return folds[r - i](x)
        return H.deriv(x, i - r)

    def value(x):
        return fact * evaluate(psi, x) * anti(x, 0)

    def derivs(x, k):
        total = 0.0
        for i in range(k + 1):
            dpsi = psi_ev.deriv(x, k - i)
            if dpsi == 0:
                continue
            total += math.comb(k, i) * dpsi * anti(x, i)
        return fact * total

    return SystemFunctionEvaluand(sys, value, derivs, max_order=10**9)


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class BlossomFunctional:
    """A blossom as a function of ``(x_block, u_block, u_nodes)``.

    ``target(t)`` is the function it must reproduce on the diagonal;
    ``curve_u`` marks functionals whose u parameters must be curve points.
    """

    name: str
    sys: GammaSystem
    m: int
    n: int
    func: Callable
    target: Callable
    curve_u: bool = False

    def __call__(self, x_block, u_block=(), u_nodes=None):
        return self.func(list(x_block), list(u_block), u_nodes)


def hom_functional(G: PiElement, m: int, tau=None) -> BlossomFunctional:
    hb = _HomBlossom(G, m, tau)
    return BlossomFunctional("hom_blossom", G.sys, m, 0, lambda xs, us, nodes: hb(xs), G.__call__)


def ext_pos_functional(G: PiElement, m: int, n: int, tau=None, homogeneous=None) -> BlossomFunctional:
    def f(xs, us, nodes):
        return ext_blossom_pos(G, BlossomQuery(xs, us), tau, homogeneous)

    return BlossomFunctional("ext_blossom_pos", G.sys, m, n, f, G.__call__)


def ext_scaled_functional(G: PiElement, m: int, n: int, d: int, tau=None) -> BlossomFunctional:
    def f(xs, us, nodes):
        return ext_blossom_scaled(G, BlossomQuery(xs, us), d, tau)

    return BlossomFunctional("ext_blossom_scaled", G.sys, m, n, f, G.__call__)


def ext_neg_functional(H, m: int, n: int, anchor=None, path: str = "auto") -> BlossomFunctional:
    sys = H.sys

    def f(xs, us, nodes):
        return ext_blossom_neg(H, BlossomQuery(xs, us, nodes), anchor, path)

    target = H.__call__ if isinstance(H, PiElement) else H.value
    return BlossomFunctional("ext_blossom_neg", sys, m, n, f, target, curve_u=True)


def random_scalar(rng: np.random.Generator, sys: GammaSystem, lo, hi):
    if sys.exact:
        den = int(rng.integers(1, 9))
        lo_i = math.ceil(Fraction(lo) * den)
        hi_i = math.floor(Fraction(hi) * den)
        return Fraction(int(rng.integers(lo_i, hi_i + 1)), den)
    return float(rng.uniform(float(lo), float(hi)))


def random_node(rng, sys: GammaSystem, margin: float = 0.05):
    a, b = sys.domain
    width = b - a
    lo = a + width * sys.scalar(margin)
    hi = b - width * sys.scalar(margin)
    return random_scalar(rng, sys, lo, hi)


def random_point(rng, sys: GammaSystem) -> HomPoint:
    """Random homogeneous point near the curve, off the unit slice."""
    t = random_node(rng, sys)
    c = sys.curve_point(t)
    s = random_scalar(rng, sys, sys.scalar("0.5"), sys.scalar("1.5"))
    jitter = random_scalar(rng, sys, sys.scalar("-0.5"), sys.scalar("0.5"))
    return HomPoint(s * c.x, s * c.w + jitter)


def _report(name, sys, inputs, lhs, rhs, tol, seed, **extras):
    return IdentityReport(
        identity=name,
        system=sys.name,
        mode=sys.mode,
        inputs=inputs,
        lhs=lhs,
        rhs_paper=rhs,
        rhs_resolved=rhs,
        tol=0 if sys.exact else tol,
        seed=seed,
        extras=extras,
    )


def check_axioms(evaluator: BlossomFunctional, sys: GammaSystem, seed: int, tol: float = 1e-10) -> list:
    """Seeded symmetry / linearity / cancellation / diagonal checks.

    Mismatches are returned as failing reports, never raised.
    """
    rng = np.random.default_rng(seed)
    m, n = evaluator.m, evaluator.n
    name = evaluator.name

    def draw_u():
        if evaluator.curve_u:
            nodes = [random_node(rng, sys) for _ in range(n)]
            return [sys.curve_point(e) for e in nodes], nodes
        return [random_point(rng, sys) for _ in range(n)], None

    xs = [random_point(rng, sys) for _ in range(m)]
    us, nodes = draw_u()
    base = evaluator(xs, us, nodes)
    inputs = {"blossom": name, "m": m, "n": n, "seed": seed}
    out = []

    if m >= 2:
        perm = list(rng.permutation(m))
        val = evaluator([xs[i] for i in perm], us, nodes)
        out.append(_report(f"{name}:x_symmetry", sys, inputs, val, base, tol, seed))
    if n >= 2:
        perm = list(rng.permutation(n))
        pn = None if nodes is None else [nodes[i] for i in perm]
        val = evaluator(xs, [us[i] for i in perm], pn)
        out.append(_report(f"{name}:u_symmetry", sys, inputs, val, base, tol, seed))
    if m >= 1:
        slot = int(rng.integers(m))
        p, r = random_point(rng, sys), random_point(rng, sys)
        a = random_scalar(rng, sys, -2, 2)
        b = random_scalar(rng, sys, -2, 2)
        combo = list(xs)
        combo[slot] = p.scale(a) + r.scale(b)
        lhs = evaluator(combo, us, nodes)
        xp, xr = list(xs), list(xs)
        xp[slot], xr[slot] = p, r
        rhs = a * evaluator(xp, us, nodes) + b * evaluator(xr, us, nodes)
        out.append(_report(f"{name}:multilinearity", sys, inputs, lhs, rhs, tol, seed))
        xh = list(xs)
        xh[slot] = p.scale(2)
        xq = list(xs)
        xq[slot] = p
        out.append(
            _report(f"{name}:homogeneity", sys, inputs, evaluator(xh, us, nodes), 2 * evaluator(xq, us, nodes), tol, seed)
        )
    if n >= 1 or evaluator.curve_u:
        if evaluator.curve_u:
            eta = random_node(rng, sys)
            y = sys.curve_point(eta)
            ext_nodes = list(nodes) + [eta]
        else:
            y = random_point(rng, sys)
            ext_nodes = None
        val = evaluator(list(xs) + [y], list(us) + [y], ext_nodes)
        out.append(_report(f"{name}:cancellation", sys, inputs, val, base, tol, seed))
    t = random_node(rng, sys)
    c = sys.curve_point(t)
    diag = evaluator([c] * m, [c] * n, [t] * n if evaluator.curve_u else None)
    out.append(_report(f"{name}:diagonal", sys, inputs, diag, evaluator.target(t), tol, seed))
    return out


def tau_spread(G: PiElement, pts: Sequence[HomPoint], taus: Sequence) -> float:
    """Relative spread ``(max - min) / max(1, |mean|)`` of ``hom_blossom`` over ``taus``."""
    vals = [hom_blossom(G, pts, t) for t in taus]
    if G.sys.exact:
        return 0.0 if all(v == vals[0] for v in vals) else float(max(vals) - min(vals))
    fv = [float(v) for v in vals]
    return (max(fv) - min(fv)) / max(1.0, abs(sum(fv) / len(fv)))

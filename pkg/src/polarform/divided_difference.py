"""Non-polynomial divided differences, confluent tables and Newton interpolation.

Distinct nodes follow the left recursion

    f[x_j..x_{j+n}] = (f[x_j..x_{j+n-2}, x_{j+n}] - f[x_j..x_{j+n-1}]) / d(x_{j+n-1}, x_{j+n})

literally. When nodes repeat, clusters are grouped and the Hermite-style
table is seeded with ``D^m f / m!``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import (
    DuplicateNodeError,
    IllConditionedError,
    InsufficientDerivativeError,
    MismatchedSystemError,
)
from .gamma_system import GammaSystem, d_matrix
from .pi_space import PiElement, evaluate, gen_derivative, multiply_linear_factor
from .reports import IdentityReport

COINCIDENCE_TOL = 1e-12
# |d| below this between distinct nodes leaves no significant digits
CONDITION_TOL = 1e-14


@dataclass(frozen=True)
class NodeList:
    nodes: tuple
    coincidence_tol: float = COINCIDENCE_TOL

    def __init__(self, nodes, coincidence_tol: float = COINCIDENCE_TOL):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "coincidence_tol", coincidence_tol)
        if not self.nodes:
            raise ValueError("at least one node is required")

    def __len__(self):
        return len(self.nodes)

    def clusters(self, exact: bool = False) -> list:
        """``[(value, multiplicity), ...]`` in order of first appearance."""
        reps: list = []
        counts: list = []
        for x in self.nodes:
            for i, r in enumerate(reps):
                same = (x == r) if exact else abs(float(x) - float(r)) <= self.coincidence_tol
                if same:
                    counts[i] += 1
                    break
            else:
                reps.append(x)
                counts.append(1)
        return list(zip(reps, counts))


def _as_nodelist(nodes) -> NodeList:
    return nodes if isinstance(nodes, NodeList) else NodeList(nodes)


class Evaluand:
    """A function together with access to its generalized derivatives."""

    max_order: int = 0

    def value(self, x):
        raise NotImplementedError

    def deriv(self, x, k: int):
        raise NotImplementedError


class PiEvaluand(Evaluand):
    max_order = math.inf

    def __init__(self, element: PiElement):
        self.element = element
        self._derivs = [element]

    def value(self, x):
        return evaluate(self.element, x)

    def deriv(self, x, k: int):
        while len(self._derivs) <= k:
            self._derivs.append(gen_derivative(self._derivs[-1], 1))
        return evaluate(self._derivs[k], x)


@dataclass
class FunctionEvaluand(Evaluand):
    """``func`` plus an optional oracle ``derivs(x, k) -> D^k f(x)``."""

    func: Callable
    derivs: Optional[Callable] = None
    max_order: int = 0

    def value(self, x):
        return self.func(x)

    def deriv(self, x, k: int):
        if k == 0:
            return self.func(x)
        if self.derivs is None or k > self.max_order:
            raise InsufficientDerivativeError(f"derivative of order {k} not available")
        return self.derivs(x, k)


def as_evaluand(f) -> Evaluand:
    if isinstance(f, Evaluand):
        return f
    if isinstance(f, PiElement):
        return PiEvaluand(f)
    if callable(f):
        return FunctionEvaluand(f)
    raise TypeError(f"cannot evaluate {type(f).__name__}")


@dataclass
class DividedDifferenceTable:
    """``entries[j, k] = f[x_j, ..., x_{j+k}]`` over ``nodes`` (in table order)."""

    nodes: list
    entries: np.ndarray
    confluent: bool = False

    @property
    def value(self):
        return self.entries[0, len(self.nodes) - 1]

    def column(self, k: int) -> list:
        return [self.entries[j, k] for j in range(len(self.nodes) - k)]

    def columns(self) -> list:
        return [self.column(k) for k in range(len(self.nodes))]


def _prepare(sys: GammaSystem, f, nodes):
    f = as_evaluand(f)
    if isinstance(f, PiEvaluand) and f.element.sys != sys:
        raise MismatchedSystemError("element belongs to another system")
    nl = _as_nodelist(nodes)
    xs = [sys.check_domain(sys.scalar(x)) for x in nl.nodes]
    return f, NodeList(xs, nl.coincidence_tol)


def _check_conditioning(sys, dmat, tol):
    n = dmat.shape[0]
    for i in range(n):
        for k in range(i + 1, n):
            if abs(dmat[i, k]) <= (0 if sys.exact else max(tol, CONDITION_TOL)):
                raise IllConditionedError(f"d(x_{i}, x_{k}) vanishes; nodes {i} and {k} are not separated")


def _dtype(sys):
    return object if sys.exact else np.float64


def divdiff_table(sys: GammaSystem, f, nodes) -> DividedDifferenceTable:
    f, nl = _prepare(sys, f, nodes)
    clusters = nl.clusters(sys.exact)
    if all(m == 1 for _, m in clusters):
        xs = list(nl.nodes)
        dmat = d_matrix(sys, xs)
        _check_conditioning(sys, dmat, nl.coincidence_tol)
        vals = np.array([f.value(x) for x in xs], dtype=_dtype(sys))
        return DividedDifferenceTable(xs, _kernels.run_literal_table(vals, dmat))
    return _confluent_table(sys, f, clusters, nl.coincidence_tol)


def _confluent_table(sys, f, clusters, tol):
    maxmult = max(m for _, m in clusters)
    if maxmult - 1 > f.max_order:
        raise InsufficientDerivativeError(
            f"multiplicity {maxmult} needs derivatives up to order {maxmult - 1}"
        )
    reps = [x for x, _ in clusters]
    rep_d = d_matrix(sys, reps)
    _check_conditioning(sys, rep_d, tol)
    conf = np.zeros((len(clusters), maxmult), dtype=_dtype(sys))
    for c, (x, m) in enumerate(clusters):
        for k in range(m):
            conf[c, k] = f.deriv(x, k) / math.factorial(k)
    xs, ids = [], []
    for c, (x, m) in enumerate(clusters):
        xs.extend([x] * m)
        ids.extend([c] * m)
    dmat = d_matrix(sys, xs)
    table = _kernels.run_hermite_table(np.array(ids, dtype=np.int64), conf, dmat)
    return DividedDifferenceTable(xs, table, confluent=True)


def divdiff(sys: GammaSystem, f, nodes):
    """Divided difference of ``f`` over all ``nodes``."""
    f, nl = _prepare(sys, f, nodes)
    clusters = nl.clusters(sys.exact)
    if all(m == 1 for _, m in clusters):
        xs = list(nl.nodes)
        if len(xs) == 1:
            return f.value(xs[0])
        dmat = d_matrix(sys, xs)
        _check_conditioning(sys, dmat, nl.coincidence_tol)
        vals = np.array([f.value(x) for x in xs], dtype=_dtype(sys))
        return _kernels.run_aitken_top(vals, dmat)
    return _confluent_table(sys, f, clusters, nl.coincidence_tol).value


def newton_interpolate(sys: GammaSystem, samples: Sequence):
    """Newton-form interpolant ``p(x) = sum_k c_k prod_{i<k} d(x_i, x)``.

    Returns ``(coefficients, evaluator)``.
    """
    xs = [sys.check_domain(sys.scalar(x)) for x, _ in samples]
    ys = [sys.scalar(y) for _, y in samples]
    if any(m > 1 for _, m in NodeList(xs).clusters(sys.exact)):
        raise DuplicateNodeError("newton_interpolate needs distinct nodes")
    table = divdiff_table(sys, FunctionEvaluand(dict(zip(xs, ys)).__getitem__), xs)
    coeffs = [table.entries[0, k] for k in range(len(xs))]
    g1 = [sys.gamma1(x) for x in xs]
    g2 = [sys.gamma2(x) for x in xs]

    def evaluator(x):
        x = sys.check_domain(sys.scalar(x))
        a, b = sys.gamma1(x), sys.gamma2(x)
        acc = coeffs[-1]
        for k in range(len(coeffs) - 2, -1, -1):
            acc = coeffs[k] + (g1[k] * b - a * g2[k]) * acc
        return acc

    return coeffs, evaluator


def check_cancellation(sys: GammaSystem, f: PiElement, nodes, extra, tol: float = 1e-10) -> IdentityReport:
    """Compare ``{d(extra, .) f}[nodes, extra]`` with ``f[nodes]``."""
    nl = _as_nodelist(nodes)
    extra = sys.check_domain(sys.scalar(extra))
    weighted = multiply_linear_factor(f, sys.curve_point(extra))
    lhs = divdiff(sys, weighted, NodeList(list(nl.nodes) + [extra], nl.coincidence_tol))
    rhs = divdiff(sys, f, nl)
    inputs = {
        "coeffs": [str(c) for c in f.coeffs],
        "nodes": [str(x) for x in nl.nodes],
        "extra": str(extra),
    }
    return IdentityReport(
        identity="cancellation_dd",
        system=sys.name,
        mode=sys.mode,
        inputs=inputs,
        lhs=lhs,
        rhs_paper=rhs,
        rhs_resolved=rhs,
        tol=0 if sys.exact else tol,
        extras={"unital": sys.is_unital},
    )


def symmetry_deviation(sys: GammaSystem, f, nodes, seed: int = 0, trials: int = 10) -> float:
    """Largest relative change of ``f[nodes]`` over random node permutations.

    Symmetry is only guaranteed for unital systems; elsewhere this measures it.
    """
    nl = _as_nodelist(nodes)
    base = divdiff(sys, f, nl)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        perm = [nl.nodes[i] for i in rng.permutation(len(nl))]
        val = divdiff(sys, f, NodeList(perm, nl.coincidence_tol))
        worst = max(worst, abs(float(val - base)) / max(1.0, abs(float(base))))
    return worst

"""Inner loops for divided-difference tables and element evaluation.

Every kernel is written once as plain numpy code. When numba is importable
and ``POLARFORM_NUMBA`` is not set to ``0``, float64 inputs are routed to an
``@njit`` compiled copy; object arrays (exact rational mode) and the
fallback path always run the uncompiled source.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _flag_enabled():
    return os.environ.get("POLARFORM_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = numba is not None and _flag_enabled()


def literal_table(vals, dmat):
    """Triangular table of the left-recursive divided difference.

    ``T[j, k]`` holds ``f[x_j, ..., x_{j+k}]``. Each row is built with an
    Aitken sweep: after pivoting on ``x_p`` the working vector stores
    ``f[x_j, ..., x_p, x_i]`` for every ``i > p``, which is exactly the
    recursion that drops the second-to-last node in the numerator.
    """
    n = vals.shape[0]
    table = np.zeros_like(dmat)
    for j in range(n):
        g = vals.copy()
        table[j, 0] = g[j]
        for p in range(j, n - 1):
            g[p + 1:] = (g[p + 1:] - g[p]) / dmat[p, p + 1:]
            table[j, p + 1 - j] = g[p + 1]
    return table


def aitken_top(vals, dmat):
    """Return ``f[x_0, ..., x_N]`` in O(N^2) (first row of ``literal_table``)."""
    n = vals.shape[0]
    g = vals.copy()
    for p in range(n - 1):
        g[p + 1:] = (g[p + 1:] - g[p]) / dmat[p, p + 1:]
    return g[n - 1]


def hermite_table(cluster, conf, dmat):
    """Generalized Hermite table over grouped nodes.

    ``cluster[j]`` is the cluster id of node ``j`` (equal ids are adjacent)
    and ``conf[c, k]`` is ``D^k f / k!`` at the representative of cluster
    ``c``. Runs of equal nodes take their value from ``conf``; other entries
    use the leave-out-first / leave-out-last quotient with ``d(x_j, x_{j+k})``.
    """
    n = cluster.shape[0]
    table = np.zeros_like(dmat)
    for j in range(n):
        table[j, 0] = conf[cluster[j], 0]
    for k in range(1, n):
        for j in range(n - k):
            if cluster[j] == cluster[j + k]:
                table[j, k] = conf[cluster[j], k]
            else:
                table[j, k] = (table[j + 1, k - 1] - table[j, k - 1]) / dmat[j, j + k]
    return table


def pi_eval_grid(coeffs, g1, g2):
    """Evaluate ``sum_k c_k g1^(n-k) g2^k`` at every grid point."""
    n = coeffs.shape[0] - 1
    out = np.zeros_like(g1)
    for i in range(g1.shape[0]):
        a = g1[i]
        b = g2[i]
        acc = coeffs[0] - coeffs[0]
        pb = b - b + 1
        for k in range(n + 1):
            pa = a - a + 1
            for _ in range(n - k):
                pa = pa * a
            acc = acc + coeffs[k] * pa * pb
            pb = pb * b
        out[i] = acc
    return out


def _compile(fn):
    if not USE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


_literal_table_f = _compile(literal_table)
_aitken_top_f = _compile(aitken_top)
_hermite_table_f = _compile(hermite_table)
_pi_eval_grid_f = _compile(pi_eval_grid)


def _is_float(*arrays):
    return all(a.dtype == np.float64 for a in arrays)


def run_literal_table(vals, dmat):
    if _is_float(vals, dmat):
        return _literal_table_f(vals, dmat)
    return literal_table(vals, dmat)


def run_aitken_top(vals, dmat):
    if _is_float(vals, dmat):
        return _aitken_top_f(vals, dmat)
    return aitken_top(vals, dmat)


def run_hermite_table(cluster, conf, dmat):
    if _is_float(conf, dmat):
        return _hermite_table_f(cluster.astype(np.int64), conf, dmat)
    return hermite_table(cluster, conf, dmat)


def run_pi_eval_grid(coeffs, g1, g2):
    if _is_float(coeffs, g1, g2):
        return _pi_eval_grid_f(coeffs, g1, g2)
    return pi_eval_grid(coeffs, g1, g2)

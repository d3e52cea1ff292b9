import json
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from polarform import _kernels

rng = np.random.default_rng(12)


def _random_case(n):
    xs = np.sort(rng.uniform(-3, 3, n))
    dmat = xs[None, :] - xs[:, None]
    return rng.uniform(-2, 2, n), dmat


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_literal_table_parity(n):
    vals, dmat = _random_case(n)
    fast = _kernels.run_literal_table(vals, dmat)
    slow = _kernels.literal_table(vals, dmat)
    np.testing.assert_allclose(fast, slow, rtol=1e-13, atol=1e-13)
    assert _kernels.run_aitken_top(vals, dmat) == pytest.approx(slow[0, n - 1], rel=1e-13, abs=1e-13)


def test_hermite_table_parity():
    xs = np.array([0.0, 0.0, 0.7, 1.3, 1.3, 1.3])
    cluster = np.array([0, 0, 1, 2, 2, 2])
    conf = rng.uniform(-1, 1, (3, 6))
    dmat = xs[None, :] - xs[:, None]
    fast = _kernels.run_hermite_table(cluster, conf, dmat)
    np.testing.assert_allclose(fast, _kernels.hermite_table(cluster, conf, dmat), rtol=1e-13, atol=1e-13)


def test_pi_eval_grid_parity():
    coeffs = rng.uniform(-1, 1, 5)
    t = np.linspace(-1, 1, 33)
    fast = _kernels.run_pi_eval_grid(coeffs, np.cos(t), np.sin(t))
    np.testing.assert_allclose(fast, _kernels.pi_eval_grid(coeffs, np.cos(t), np.sin(t)), rtol=1e-13)


def test_object_arrays_stay_exact():
    xs = [Fraction(0), Fraction(1), Fraction(3)]
    vals = np.array([x * x for x in xs], dtype=object)
    dmat = np.array([[b - a for b in xs] for a in xs], dtype=object)
    assert _kernels.run_aitken_top(vals, dmat) == 1
    assert isinstance(_kernels.run_aitken_top(vals, dmat), Fraction)


_PROBE = """
import json, numpy as np
from polarform import _kernels, make_preset, PiElement, divdiff
s = make_preset("unital_sine")
f = PiElement.from_coeffs(s, [0.3, -1.0, 0.5, 0.2])
print(json.dumps({"numba": _kernels.USE_NUMBA,
                  "value": divdiff(s, f, [-1.0, -0.2, 0.4, 0.9]),
                  "confluent": divdiff(s, f, [0.1, 0.1, 0.5])}))
"""


def _probe(flag):
    env = dict(os.environ, POLARFORM_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", _PROBE], capture_output=True, text=True, env=env, check=True)
    return json.loads(out.stdout)


def test_env_flag_selects_path():
    on, off = _probe("1"), _probe("0")
    assert off["numba"] is False
    assert on["numba"] is (_kernels.numba is not None)
    assert on["value"] == pytest.approx(off["value"], rel=1e-13)
    assert on["confluent"] == pytest.approx(off["confluent"], rel=1e-13)

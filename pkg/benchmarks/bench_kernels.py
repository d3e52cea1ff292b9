"""Compare the numba kernels against the plain numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Both paths call the same source functions; the compiled copies are the ones
``POLARFORM_NUMBA=1`` selects for float64 inputs. Compilation happens in a
warm-up call and is not timed.
"""

import argparse
import json
import time

import numpy as np

from polarform import _kernels


def _case(n, seed=0):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.uniform(-3, 3, n))
    return rng.uniform(-1, 1, n), xs[None, :] - xs[:, None]


def _time(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not _kernels.USE_NUMBA:
        print(json.dumps({"numba": False, "note": "POLARFORM_NUMBA=0 or numba missing; nothing to compare"}))
        return
    rows = []
    for n in (8, 32, 128):
        vals, dmat = _case(n)
        coeffs = np.linspace(-1, 1, n)
        t = np.linspace(-1, 1, 4 * n)
        cluster = np.repeat(np.arange(n // 2), 2)
        conf = np.random.default_rng(1).uniform(-1, 1, (n // 2, n))
        cases = {
            "literal_table": (_kernels._literal_table_f, _kernels.literal_table, (vals, dmat)),
            "aitken_top": (_kernels._aitken_top_f, _kernels.aitken_top, (vals, dmat)),
            "hermite_table": (_kernels._hermite_table_f, _kernels.hermite_table, (cluster, conf, dmat)),
            "pi_eval_grid": (_kernels._pi_eval_grid_f, _kernels.pi_eval_grid, (coeffs, np.cos(t), np.sin(t))),
        }
        for name, (fast, slow, fargs) in cases.items():
            tf = _time(fast, fargs, args.repeat)
            ts = _time(slow, fargs, args.repeat)
            same = np.allclose(fast(*fargs), slow(*fargs), rtol=1e-12, atol=1e-12)
            rows.append({"kernel": name, "n": n, "numba_s": tf, "numpy_s": ts, "speedup": ts / tf, "agree": bool(same)})
    for r in rows:
        print(f"{r['kernel']:>14} n={r['n']:<4} numba {r['numba_s']:.2e} s  numpy {r['numpy_s']:.2e} s  "
              f"x{r['speedup']:.1f}  agree={r['agree']}")


if __name__ == "__main__":
    main()

"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import sys
import timeit

import numpy as np

from kcswitch import _pykernels

try:
    from kcswitch import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(60, 60))
    sym = a @ a.T
    ranks = np.arange(1, 19, dtype=np.int_)
    tokens = ("사랑해 love 아파트APT 1234 oh yeah 너를 baby " * 500).split()
    return {
        "jacobi_eigh 60x60": lambda k: k.jacobi_eigh(sym),
        "rank_sum_tail_counts 9+9": lambda k: k.rank_sum_tail_counts(ranks, 9, 80),
        "script_code x4000 tokens": lambda k: [k.script_code(t) for t in tokens],
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the fallback can be timed", file=sys.stderr)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels

    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases().items():
        times = {}
        for name, mod in backends.items():
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

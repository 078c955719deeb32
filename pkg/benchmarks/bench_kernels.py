"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from shortpa import _pykernels, kernels

try:
    from shortpa import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    AX = rng.integers(-5, 6, size=(24, 400), dtype=np.int64)
    RHS = rng.integers(0, 12, size=(24, 300), dtype=np.int64)
    triples = [(int(g), int(h), int(e)) for g, h, e in rng.integers(1, 40, size=(30, 3))]
    # lattice-free points force the full row loop
    free = _pykernels.lattice_free_points(28657, 10946, 2)
    return {
        "parallelogram_empty": lambda k: [k.parallelogram_empty(a, b, 28657, 10946) for a, b in free],
        "lattice_free_scan": lambda k: k.lattice_free_points_scan(987, 377, 2),
        "lattice_free_points": lambda k: k.lattice_free_points(28657, 10946, 2),
        "uncovered_mask": lambda k: k.uncovered_mask(0, 200_000, triples),
        "all_rhs_feasible": lambda k: k.all_rhs_feasible(AX, RHS),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':22s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:22s} {py:10.2f} {'-':>10s} {'-':>8s}")
            continue
        assert _same(fn(_pykernels), fn(_ckernels)), name
        cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:22s} {py:10.2f} {cy:10.2f} {py / cy:7.1f}x")
    print(f"active backend: {kernels.backend()}")


def _same(a, b):
    if isinstance(a, (bytes, bytearray)) or hasattr(a, "tobytes"):
        return bytes(a) == bytes(b)
    if isinstance(a, list):
        return [tuple(x) if not isinstance(x, bool) else x for x in a] == [
            tuple(x) if not isinstance(x, bool) else x for x in b
        ]
    return bool(a) == bool(b)


if __name__ == "__main__":
    main()

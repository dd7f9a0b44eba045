"""Benchmark the compiled digest kernels against the pure-numpy reference.

Both backends are imported directly (the package-level selector is
bypassed) so one process can time them side by side and confirm the
outputs stay bit-identical while doing so.

Usage: python3 benchmarks/compare_kernels.py [--sizes 32,64,128,256]
"""

import argparse
import time

import numpy as np

from geocanon._kernels import reference as ref

try:
    from geocanon._kernels import _fastdigest as compiled
except ImportError:
    compiled = None


def _median_time(fn, reps=5):
    fn()  # warm up
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples))


def _fast_inputs(n, seed):
    rng = np.random.default_rng(seed)
    d4 = rng.integers(0, 10**9, (n, 4)).astype(np.int64)
    node_h = np.asarray(ref.hash_items(
        rng.integers(0, 5, (n, 1)).astype(np.int64), ref.SEED_ITEM),
        dtype=np.uint64)
    ne = n * (n - 1)
    src, dst = np.nonzero(~np.eye(n, dtype=bool))
    edge_h = np.asarray(ref.hash_items(
        rng.integers(0, 5, (ne, 1)).astype(np.int64), ref.SEED_ITEM),
        dtype=np.uint64)
    return d4, node_h, src.astype(np.int64), dst.astype(np.int64), edge_h


def _general_inputs(n, seed):
    rng = np.random.default_rng(seed)
    pos = rng.normal(size=(n, 3))
    d = np.linalg.norm(pos[:, None] - pos[None], axis=-1)
    dq = np.floor(d / 1e-6 + 0.5).astype(np.int64)
    node_h = np.asarray(ref.hash_items(
        rng.integers(0, 5, (n, 1)).astype(np.int64), ref.SEED_ITEM),
        dtype=np.uint64)
    src, dst = np.nonzero(~np.eye(n, dtype=bool))
    edge_h = np.asarray(ref.hash_items(
        np.zeros((len(src), 1), dtype=np.int64), ref.SEED_ITEM),
        dtype=np.uint64)
    return pos, dq, node_h, src.astype(np.int64), dst.astype(np.int64), edge_h


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="32,64,128,256,512")
    ap.add_argument("--general-sizes", default="6,8,10,12")
    args = ap.parse_args()

    if compiled is None:
        print("compiled backend not built; only the reference is available")
        return

    print(f"{'kernel':<14}{'N':>6}{'reference':>14}{'compiled':>14}"
          f"{'speedup':>10}  identical")
    for n in (int(s) for s in args.sizes.split(",")):
        inp = _fast_inputs(n, n)
        r = ref.fast_scan(*inp)
        c = compiled.fast_scan(*inp)
        same = tuple(int(v) for v in r) == tuple(int(v) for v in c)
        tr = _median_time(lambda: ref.fast_scan(*inp))
        tc = _median_time(lambda: compiled.fast_scan(*inp))
        print(f"{'fast_scan':<14}{n:>6}{tr * 1e3:>12.3f}ms{tc * 1e3:>12.3f}ms"
              f"{tr / tc:>9.1f}x  {same}")
    for n in (int(s) for s in args.general_sizes.split(",")):
        inp = _general_inputs(n, n)
        r = ref.general_scan(*inp, 1e-9, 1e-6)
        c = compiled.general_scan(*inp, 1e-9, 1e-6)
        same = tuple(int(v) for v in r) == tuple(int(v) for v in c)
        tr = _median_time(lambda: ref.general_scan(*inp, 1e-9, 1e-6), reps=3)
        tc = _median_time(lambda: compiled.general_scan(*inp, 1e-9, 1e-6),
                          reps=3)
        print(f"{'general_scan':<14}{n:>6}{tr * 1e3:>12.3f}ms{tc * 1e3:>12.3f}ms"
              f"{tr / tc:>9.1f}x  {same}")


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python elimination kernels on jet matrices.

Usage: python3 benchmarks/bench_kernel.py [--repeat N]
"""
import argparse
import time

from fatlocus import linalg
from fatlocus.configuration import generate
from fatlocus.embedding import EmbeddingSpace, fat_matrix

CASES = [
    ("veronese:2:4 collinear r=3", EmbeddingSpace.veronese(2, 4), "collinear", 3),
    ("veronese:2:6 generic r=7", EmbeddingSpace.veronese(2, 6), "generic", 7),
    ("veronese:3:6 collinear r=4", EmbeddingSpace.veronese(3, 6), "collinear", 4),
    ("veronese:3:6 generic r=15", EmbeddingSpace.veronese(3, 6), "generic", 15),
    ("veronese:5:3 generic r=9", EmbeddingSpace.veronese(5, 3), "generic", 9),
    ("sv:2:2,1:3 ruling r=3", EmbeddingSpace.segre_veronese([(2, 2), (1, 3)]), "sv_ruling", 3),
]


def workload(space, kind, r):
    a = generate(kind, space, r, seed=7)
    rows = [list(x) for x in fat_matrix(space, a).rows]
    return rows, space.ambient


def time_backend(name, rows, ncols, repeat):
    linalg.use_backend(name)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        linalg.rank_int([list(r) for r in rows], ncols)
        linalg.kernel_int([list(r) for r in rows], ncols)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = linalg.available_backends()
    original = linalg.backend()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':<30} {'shape':>9} " + " ".join(f"{b + ' ms':>12}" for b in backends) + "   speedup")
    try:
        for label, space, kind, r in CASES:
            rows, ncols = workload(space, kind, r)
            times = {b: time_backend(b, rows, ncols, args.repeat) for b in backends}
            speed = ""
            if "compiled" in times:
                speed = f"{times['python'] / times['compiled']:8.2f}x"
            cols = " ".join(f"{times[b] * 1000:12.2f}" for b in backends)
            print(f"{label:<30} {len(rows):>4}x{ncols:<4} {cols}   {speed}")
    finally:
        linalg.use_backend(original)


if __name__ == "__main__":
    main()

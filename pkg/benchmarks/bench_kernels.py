"""Compare the compiled and pure-Python elimination kernels.

    python benchmarks/bench_kernels.py [--sizes 40,80,160] [--repeat 3]

Both backends run on the same random matrices and must agree on every rank.
"""
import argparse
import random
import timeit

from monadforge import _kernels_py

try:
    from monadforge import _kernels
except ImportError:
    _kernels = None

P = 1000003


def random_matrix(rng, m, n, rank, lo=-9, hi=9):
    # a product of random m x r and r x n factors has rank <= r
    left = [[rng.randint(lo, hi) for _ in range(rank)] for _ in range(m)]
    right = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(rank)]
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*right)] for row in left]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="40,80,160")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return
    rng = random.Random(args.seed)
    print(f"{'kernel':<14}{'size':>6}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for n in map(int, args.sizes.split(",")):
        M = random_matrix(rng, n, n, n - n // 4)
        for name, py, cy in (
            ("rank_mod_p", lambda: _kernels_py.rank_mod_p(M, P), lambda: _kernels.rank_mod_p(M, P)),
            ("rank_integer", lambda: _kernels_py.rank_integer(M), lambda: _kernels.rank_integer(M)),
        ):
            if name == "rank_integer" and n > 80:
                continue  # Bareiss on big integers is quadratic in the entry size; keep the run short
            assert py() == cy(), f"backends disagree on {name} at n={n}"
            t_py = min(timeit.repeat(py, number=1, repeat=args.repeat))
            t_cy = min(timeit.repeat(cy, number=1, repeat=args.repeat))
            print(f"{name:<14}{n:>6}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()

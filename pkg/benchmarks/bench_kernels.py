"""Time the compiled and numpy kernels on the same criterion plans.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Element lookup is done once per case, so only ``plan_sums`` is timed.
"""
import argparse
import timeit

from gmedim import kernels
from gmedim.criteria import plan_for
from gmedim.states import random_mixed
from gmedim.tensor import DenseProvider, SystemShape

CASES = [(3, 3, 0), (3, 4, 1), (4, 3, 1), (4, 4, 2), (5, 3, 2), (6, 3, 3)]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    names = kernels.available_backends()
    print(f"{'n':>2} {'d':>2} {'m':>2} {'terms':>8} " + " ".join(f"{b + ' [us]':>14}" for b in names))
    for n, d, m in CASES:
        shape = SystemShape(n, d)
        plan = plan_for(shape, m)
        provider = DenseProvider(random_mixed(shape, 0, 2))
        off = provider.elements(plan.off_rows, plan.off_cols)
        diag = provider.diagonal(plan.diag_index)
        times = []
        for name in names:
            fn = kernels.get_backend(name).plan_sums
            t = min(timeit.repeat(lambda: fn(off, diag, plan.p_u, plan.p_v, plan.d_pos, 1e-12),
                                  number=1, repeat=args.repeat))
            times.append(t * 1e6)
        print(f"{n:>2} {d:>2} {m:>2} {plan.p_u.size:>8} " + " ".join(f"{t:>14.1f}" for t in times))


if __name__ == "__main__":
    main()

"""Compiled vs fallback kernels on campaign-sized inputs.

    python benchmarks/bench_kernels.py [--rows 100000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from amgm_gap import kernels
from amgm_gap.verify import CampaignConfig, _draw_atoms, _pack, trial_rng


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=100_000)
    ap.add_argument("--grid", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    cfg = CampaignConfig(trials=args.rows, seed=1)
    values, probs = _pack([_draw_atoms(cfg, trial_rng(cfg.seed, i)) for i in range(args.rows)], cfg.max_atoms)
    cs = np.concatenate([[0.0], np.geomspace(1e-6, 1e9, args.grid - 1)])

    impls = kernels.backends()
    print(f"{'kernel':<20}{'backend':<10}{'seconds':>12}{'speedup':>10}")
    for name, work in (
        (f"batch x{args.rows}", lambda k: k.batch_summaries(values, probs)),
        (f"psi_grid x{args.grid}", lambda k: k.psi_grid(0.0, 2.5, 0.2, cs)),
    ):
        times = {b: best_of(lambda: work(impl), args.repeat) for b, impl in impls.items()}
        outs = {b: work(impl) for b, impl in impls.items()}
        ref = outs["python"]
        for b, t in times.items():
            agree = np.allclose(outs[b], ref, rtol=1e-12, atol=0.0, equal_nan=True)
            print(f"{name:<20}{b:<10}{t:>12.4f}{times['python'] / t:>9.1f}x" + ("" if agree else "  MISMATCH"))


if __name__ == "__main__":
    main()

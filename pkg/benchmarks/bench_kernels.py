"""Compare the compiled and numpy pair kernels on catalog graph samples.

Usage: python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from varconv import builtin, localization
from varconv.catalog import box_grid
from varconv.kernels import backends

CASES = [
    ("abs, 1D, res 801", "abs", [0.0], [0.0], 801),
    ("f1_neg_quartic, 1D, res 2001", "f1_neg_quartic", [0.0], [0.0], 2001),
    ("orthant_quad(2,3), 2D, res 41", "orthant_quad(2,3)", [0.0, 0.0], [0.0, 0.0], 41),
]


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = backends()
    if "compiled" not in impls:
        print("compiled extension not built; only the numpy backend is available")
    print(f"{'case':34s} {'kernel':15s} {'N':>6s} " + " ".join(f"{k:>10s}" for k in impls) + "   speedup  agree")
    for label, name, x, v, res in CASES:
        f = builtin(name)
        g = localization(f, x, v, 0.25, resolution=res)
        XP = box_grid(np.array(x), 0.25, res)
        FP = f.evaluate_many(XP)
        jobs = {
            "monotone_pairs": lambda m: m.monotone_pairs(g.X, g.XS, 0.5),
            "growth_pairs": lambda m: m.growth_pairs(XP, FP, g.X, g.XS, g.F, 0.5),
            "affine_max": lambda m: m.affine_max(XP, g.X, g.XS, g.F),
        }
        for kname, job in jobs.items():
            times, outs = {}, {}
            for bname, mod in impls.items():
                times[bname], outs[bname] = _time(lambda: job(mod), args.repeat)
            ref = outs["python"]
            agree = all(np.allclose(np.asarray(o, dtype=float), np.asarray(ref, dtype=float), rtol=1e-12, atol=1e-14)
                        for o in outs.values())
            speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
            print(f"{label:34s} {kname:15s} {len(g):6d} "
                  + " ".join(f"{times[b] * 1e3:8.2f}ms" for b in impls)
                  + f"   {speed:6.1f}x  {agree}")


if __name__ == "__main__":
    main()

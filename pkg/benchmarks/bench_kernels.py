"""Compare the compiled and pure-Python biquad kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the raw kernel on one whoosh-length buffer and a full render of the
64-publication appendix corpus with each backend, and checks that both
backends produce identical samples.
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

import numpy as np

from sonimetrics import _ext, synthesis
from sonimetrics.ingest import parse_records
from sonimetrics.mapping import map_record
from sonimetrics.sequencing import build_legend, concat, schedule

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def corpus_timeline():
    segments = []
    for name in ("corpus_early.csv", "corpus_late.csv"):
        recs = parse_records((FIXTURES / name).read_bytes(), "csv")
        segments.append(schedule([map_record(r, r.mncs) for r in recs]))
    return concat([build_legend(), *segments], 2.0)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"python": _ext.py_biquad_tv}
    if _ext.c_biquad_tv is not None:
        backends["cython"] = _ext.c_biquad_tv
    else:
        print("compiled kernel unavailable; timing the fallback only")

    n = synthesis.n_samples(0.35, 44100)
    x = np.random.default_rng(0).uniform(-1, 1, n)
    coeffs = synthesis._bandpass_coefficients(800.0 * 5.0 ** (np.arange(n) / (n - 1)), 2.0, 44100)
    tl = corpus_timeline()

    results = {}
    original = synthesis.biquad_tv
    try:
        for name, kernel in backends.items():
            k_time, _ = best_of(lambda: kernel(x, *coeffs), args.repeat)
            synthesis.biquad_tv = kernel
            r_time, buf = best_of(lambda: synthesis.render(tl), max(1, args.repeat // 2))
            results[name] = (k_time, r_time, buf.samples)
    finally:
        synthesis.biquad_tv = original

    print(f"{'backend':<8} {'kernel (' + str(n) + ' samples)':>26} {'full render':>14}")
    for name, (k_time, r_time, _) in results.items():
        print(f"{name:<8} {k_time * 1e3:>23.3f} ms {r_time:>12.3f} s")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup: kernel x{py[0] / cy[0]:.0f}, render x{py[1] / cy[1]:.1f}")
        print("identical output:", py[2].tobytes() == cy[2].tobytes())


if __name__ == "__main__":
    main()

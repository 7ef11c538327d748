"""Compare the compiled and pure-Python dispatcher kernels.

Usage: python3 benchmarks/bench_dispatch.py [--scenarios N] [--repeat R]

Each kernel dispatches the same pre-expanded scenarios for the AGC fixture
and a few random models, so only the dispatch loop is timed.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from capsched import dsl
from capsched.fixtures import path as fixture_path
from capsched.sim import CompiledModel, random_scenario
from capsched.sim import kernel
from capsched.sim.scenario import expand

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from modelgen import random_model  # noqa: E402


def _prepared(cm, scenarios):
    # mirror CompiledModel.run up to the kernel call
    out = []
    for scn in scenarios:
        arrivals = expand(cm.model, scn)
        txn = np.concatenate([np.full(a.arrival.size, i, dtype=np.int64) for i, a in enumerate(arrivals)])
        arr = np.concatenate([a.arrival for a in arrivals])
        rel = np.concatenate([a.release for a in arrivals])
        order = np.lexsort((txn, arr))
        arr, rel, txn = arr[order], rel[order], txn[order]
        inst = np.arange(arr.size, dtype=np.int64)
        root = cm.root_job[txn]
        by_rel = np.lexsort((inst, root, rel))
        out.append((rel[by_rel], root[by_rel], inst[by_rel], int(arr.size)))
    return out


def _time(fn, cm, batches, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for rel, root, inst, n in batches:
            fn(cm.job_cost, cm.job_prio, cm.emit_ptr, cm.emit_off, cm.emit_tgt, rel, root, inst, n)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenarios", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    models = [("agc", dsl.load(fixture_path("agc.rts")))]
    models += [(f"random-{s}", random_model(s)) for s in (1, 2, 3)]
    kernels = [("python", kernel.python_dispatch)]
    if kernel.compiled_dispatch is not None:
        kernels.append(("cython", kernel.compiled_dispatch))
    else:
        print("compiled kernel not built; timing the fallback only")

    print(f"{'model':<10} {'releases':>9} " + " ".join(f"{k:>10}" for k, _ in kernels) + "   speedup")
    for name, model in models:
        cm = CompiledModel(model)
        batches = _prepared(cm, [random_scenario(model, s) for s in range(args.scenarios)])
        releases = sum(b[3] for b in batches)
        times = [_time(fn, cm, batches, args.repeat) for _, fn in kernels]
        speedup = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else ""
        print(f"{name:<10} {releases:>9} " + " ".join(f"{t:>9.3f}s" for t in times) + f" {speedup}")


if __name__ == "__main__":
    main()

"""Benchmark the compiled kernels against the numpy fallback.

Times the two fixed-point sweeps on synthetic systems of growing size and the
trajectory stepper on the bundled maintenance model. Run from the repository
root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 16 128 512 --trials 200000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from relimax._kernels import _fallback
from relimax.bundled import maintenance_spec
from relimax.model import policy_from_names, validate_model

try:
    from relimax._kernels import _core
except ImportError:
    _core = None

ACTIONS = 3


def synthetic_system(n_states: int, rng: np.random.Generator):
    """Random substochastic pair rows with a positive one-step failure mass."""
    pairs = n_states * ACTIONS
    full = rng.dirichlet(np.ones(n_states + 1), size=pairs)
    rows = np.ascontiguousarray(full[:, :n_states])
    b = np.ascontiguousarray(full[:, n_states])
    starts = np.arange(n_states + 1, dtype=np.int64) * ACTIONS
    pidx = starts[:-1] + rng.integers(0, ACTIONS, size=n_states)
    return rows, b, np.ascontiguousarray(pidx), starts


def best_of(fn, repeats: int = 5) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def fmt(seconds: float) -> str:
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.3f} s "


def bench_fixed_points(sizes, rng) -> None:
    print(f"{'kernel':<6} {'states':>6} {'numpy':>11} {'cython':>11} {'speedup':>8}")
    for n in sizes:
        rows, b, pidx, starts = synthetic_system(n, rng)
        for label, args in (("pes", (rows, b, pidx)),
                            ("vi", (rows, b, starts))):
            fn = getattr(_fallback, f"{label}_fixed_point")
            t_np = best_of(lambda: fn(*args, 1e-12, 100_000))
            if _core is None:
                print(f"{label:<6} {n:>6} {fmt(t_np)} {'-':>11} {'-':>8}")
                continue
            cfn = getattr(_core, f"{label}_fixed_point")
            t_cy = best_of(lambda: cfn(*args, 1e-12, 100_000))
            x_np = fn(*args, 1e-12, 100_000)[0]
            x_cy = cfn(*args, 1e-12, 100_000)[0]
            assert np.allclose(x_np, x_cy, atol=1e-10)
            print(f"{label:<6} {n:>6} {fmt(t_np)} {fmt(t_cy)} {t_np / t_cy:>7.1f}x")


def bench_simulation(trials: int, horizon: int, rng: np.random.Generator) -> None:
    model = validate_model(maintenance_spec())
    policy = policy_from_names(model, {
        s: ("c" if s in ("12", "21") else "idle") for s in model.state_names})
    n = model.n_states
    cum = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        if i in model.failed_states:
            cum[i, i:] = 1.0
        else:
            cum[i] = np.cumsum(model.rows[(i, policy.choice[i])])
    failed = np.zeros(n, dtype=np.uint8)
    failed[sorted(model.failed_states)] = 1
    start = model.state_id("22")
    uniforms = rng.random((horizon, trials))

    def run(step):
        cur = np.full(trials, start, dtype=np.int64)
        alive = np.ones(trials, dtype=np.uint8)
        hits = 0
        for k in range(horizon):
            if not alive.any():
                break
            hits += step(cum, failed, cur, alive, uniforms[k])
        return hits

    print(f"\nsimulate: maintenance model, {trials} trajectories, "
          f"horizon {horizon}")
    t_np = best_of(lambda: run(_fallback.simulate_step), repeats=3)
    print(f"numpy  {fmt(t_np)}   ({run(_fallback.simulate_step) / trials:.5f} failed)")
    if _core is None:
        print("cython     (extension not built)")
        return
    t_cy = best_of(lambda: run(_core.simulate_step), repeats=3)
    assert run(_core.simulate_step) == run(_fallback.simulate_step)
    print(f"cython {fmt(t_cy)}   speedup {t_np / t_cy:.1f}x")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 64, 256, 1024])
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--horizon", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _core is None:
        print("note: compiled extension not built, timing the fallback only\n")
    rng = np.random.default_rng(args.seed)
    bench_fixed_points(args.sizes, rng)
    bench_simulation(args.trials, args.horizon, rng)


if __name__ == "__main__":
    main()

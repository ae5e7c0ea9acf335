"""Hot-loop kernels with two interchangeable backends.

The compiled Cython core is preferred; the numpy fallback is selected when
the extension is absent (or when RELIMAX_DISABLE_EXTENSION is set in the
environment). Both expose the same three functions with identical semantics:

    pes_fixed_point(rows, b, pidx, tol, max_iters)   -> (x, iters, gap)
    vi_fixed_point(rows, b, starts, tol, max_iters)  -> (x, iters, gap)
    simulate_step(cum, failed, cur, alive, u)        -> hits this step

simulate_step must produce bit-identical trajectories across backends: both
advance each live trajectory to the first index whose cumulative row value
exceeds the trajectory's uniform draw (clamped to the last state), using the
same IEEE comparisons.
"""

import os

if os.environ.get("RELIMAX_DISABLE_EXTENSION"):
    from relimax._kernels import _fallback as _impl
    BACKEND = "numpy"
else:
    try:
        from relimax._kernels import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from relimax._kernels import _fallback as _impl
        BACKEND = "numpy"

pes_fixed_point = _impl.pes_fixed_point
vi_fixed_point = _impl.vi_fixed_point
simulate_step = _impl.simulate_step

__all__ = ["BACKEND", "pes_fixed_point", "vi_fixed_point", "simulate_step"]

"""Kernel backend selection.

Prefers the compiled extension (``ksnr._core``) when it was built, otherwise
falls back to the pure-numpy kernels.  Override with the environment variable
``KSNR_BACKEND=compiled`` (fail if unavailable) or ``KSNR_BACKEND=python``.
"""

import os

_requested = os.environ.get("KSNR_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "python"):
    raise RuntimeError(f"KSNR_BACKEND must be 'compiled' or 'python', got {_requested!r}")

_impl = None
if _requested != "python":
    try:
        from ksnr import _core as _impl
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = None
if _impl is None:
    from ksnr import _core_py as _impl

BACKEND = "compiled" if _impl.__name__.endswith("._core") else "python"

rff_block = _impl.rff_block
limit_cycle_step = _impl.limit_cycle_step
cartpole_step = _impl.cartpole_step
rollout_rff_limit_cycle = _impl.rollout_rff_limit_cycle
rollout_rff_cartpole = _impl.rollout_rff_cartpole
linear_rollout_obs = _impl.linear_rollout_obs


def available_backends():
    """Names of the kernel implementations importable in this install."""
    names = ["python"]
    try:
        from ksnr import _core  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names

"""Backend selection for the hot RK4 flow kernel.

Prefers the compiled Cython extension and falls back to the NumPy
implementation when the extension is unavailable. Set HJNET_KERNELS=python to
force the fallback or HJNET_KERNELS=cython to require the extension.
"""

import os

from . import _flow_np

_REQUESTED = os.environ.get("HJNET_KERNELS", "auto").strip().lower()

if _REQUESTED in ("auto", ""):
    try:
        from . import _flow_cy as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _flow_np
        BACKEND = "python"
elif _REQUESTED == "cython":
    from . import _flow_cy as _impl
    BACKEND = "cython"
elif _REQUESTED in ("python", "numpy"):
    _impl = _flow_np
    BACKEND = "python"
else:
    raise ValueError(f"HJNET_KERNELS must be auto, cython or python, got {_REQUESTED!r}")

KIND_FREE = _flow_np.KIND_FREE
KIND_POTENTIAL = _flow_np.KIND_POTENTIAL
KIND_ADVECTION = _flow_np.KIND_ADVECTION

rk4_flow = _impl.rk4_flow
rk4_flow_python = _flow_np.rk4_flow

try:
    from . import _flow_cy as _cy_module
    rk4_flow_cython = _cy_module.rk4_flow
except ImportError:
    rk4_flow_cython = None

__all__ = [
    "BACKEND",
    "KIND_FREE",
    "KIND_POTENTIAL",
    "KIND_ADVECTION",
    "rk4_flow",
    "rk4_flow_python",
    "rk4_flow_cython",
]

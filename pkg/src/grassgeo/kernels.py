"""Backend selection for the projector kernels.

The compiled ``_core`` extension is used when it imports; set
``GRASSGEO_PURE=1`` to force the numpy fallback.
"""

import os

if os.environ.get("GRASSGEO_PURE"):
    from . import _fallback as _impl

    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "python"

projector_batch = _impl.projector_batch
projector_jacobians = _impl.projector_jacobians

__all__ = ["BACKEND", "projector_batch", "projector_jacobians"]

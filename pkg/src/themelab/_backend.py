"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set THEMELAB_PURE=1 to force the pure kernel (used by the equivalence tests
and the benchmark).
"""

import os

if os.environ.get("THEMELAB_PURE"):
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel_c as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

BACKEND = kernel.BACKEND

"""Backend selection for the hot eigensolver kernels.

``SUBSPEC_BACKEND=numpy`` forces the pure-numpy path; anything else
(default) uses numba when importable and falls back silently otherwise.
"""

from __future__ import annotations

import os

_requested = os.environ.get("SUBSPEC_BACKEND", "numba").strip().lower()

if _requested == "numpy":
    from . import _kernels_numpy as kernels

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as kernels  # type: ignore[no-redef]

        BACKEND = "numba"
    except ImportError:
        from . import _kernels_numpy as kernels  # type: ignore[no-redef]

        BACKEND = "numpy"


def backend_name() -> str:
    return BACKEND

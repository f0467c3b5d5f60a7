"""Backend selection for the hot kernels.

Set ``LPWAVE_DISABLE_NUMBA=1`` to force the pure-numpy path. Numba's own
``NUMBA_DISABLE_JIT`` is honoured too (the decorated functions then run as
plain Python, which is correct but slow).
"""

import os

_FLAG = os.environ.get("LPWAVE_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"

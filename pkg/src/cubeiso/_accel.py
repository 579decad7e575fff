"""Kernel backend selection.

Set ``CUBEISO_DISABLE_NUMBA=1`` before import to force the pure numpy/scipy
kernels. Numba is used otherwise, when importable.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def numba_disabled():
    return os.environ.get("CUBEISO_DISABLE_NUMBA", "").strip().lower() not in _FALSY


def _load():
    if not numba_disabled():
        try:
            from . import _kernels_numba as mod

            return mod, "numba"
        except ImportError:  # pragma: no cover - numba is a declared dependency
            pass
    from . import _kernels_numpy as mod

    return mod, "numpy"


kernels, BACKEND = _load()

"""Hot numerical loops: compiled extension when built, numpy fallback otherwise.

Set ``TEMPAGG_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the cross-implementation tests).
"""

from __future__ import annotations

import os

from ..forecasting import Approach
from . import _fallback

APPROACH_CODE = {Approach.NA: _fallback.NA, Approach.NOA: _fallback.NOA, Approach.OA: _fallback.OA}

_impl = _fallback
if not os.environ.get("TEMPAGG_PURE_PYTHON"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        pass

BACKEND = "compiled" if _impl is not _fallback else "python"
mse_grid = _impl.mse_grid
ses_fit_windows = _impl.ses_fit_windows

__all__ = ["APPROACH_CODE", "BACKEND", "mse_grid", "ses_fit_windows"]

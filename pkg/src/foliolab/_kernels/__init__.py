"""Kernel selection: compiled extension when built, else pure Python.

Set ``FOLIOLAB_PURE=1`` to force the fallback (used by the benchmark
and the backend-parity tests).
"""

import os

if os.environ.get("FOLIOLAB_PURE") == "1":
    from . import pure as _impl
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import pure as _impl
        BACKEND = "pure"

cut_profile = _impl.cut_profile
sample_markov_path = _impl.sample_markov_path

__all__ = ["cut_profile", "sample_markov_path", "BACKEND"]

"""Backend selection: compiled pair-loop core with a numpy fallback.

The hot per-pair kernels (rate sums and knot adaptation) exist twice: a
Cython extension (geosph.backends._ckernels) and a vectorized numpy module
with identical signatures and semantics.  The compiled one is picked at
import when available; GEOSPH_BACKEND=python|c forces the choice.
"""

from __future__ import annotations

import os

from . import py_backend


def _load_compiled():
    from . import _ckernels  # noqa: F401  (ImportError when not built)

    return _ckernels


def get_backend(name: str | None = None):
    """Return the backend module; ``name`` in {auto, c, python}."""
    name = (name or os.environ.get("GEOSPH_BACKEND", "auto")).lower()
    if name in ("auto",):
        try:
            return _load_compiled()
        except ImportError:
            return py_backend
    if name in ("c", "compiled", "cython"):
        return _load_compiled()
    if name in ("python", "py", "numpy"):
        return py_backend
    raise ValueError(f"unknown backend {name!r}")


def backend_name(module) -> str:
    return "compiled" if module.__name__.endswith("_ckernels") else "python"

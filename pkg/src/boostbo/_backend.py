"""Select the compiled core or the NumPy fallback at import time.

Set ``BOOSTBO_BACKEND=python`` to force the fallback, or ``compiled`` to
fail loudly when the extension is missing.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

_choice = os.environ.get("BOOSTBO_BACKEND", "").strip().lower()

try:
    from . import _core, _scan  # type: ignore[attr-defined]
except ImportError:
    if _choice == "compiled":
        raise
    _core = _scan = None

_use_compiled = _core is not None and _choice != "python"
impl: ModuleType = _core if _use_compiled else _fallback
scan_impl: ModuleType = _scan if _use_compiled else _fallback

NAME: str = impl.NAME
cross_kernel = impl.cross_kernel
lml_and_grad = impl.lml_and_grad
train = impl.train
# bulk posterior scans; may differ from cross_kernel by a few ulp
scan_kernel = scan_impl.cross_kernel


def available() -> dict[str, ModuleType]:
    """All importable backends keyed by name."""
    out = {"python": _fallback}
    if _core is not None:
        out["compiled"] = _core
    return out

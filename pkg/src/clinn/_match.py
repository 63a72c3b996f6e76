"""Kernel backend selection.

Prefers the compiled kernel when the extension built; falls back to the
pure-Python twin otherwise. Set CLINN_KERNEL=py or CLINN_KERNEL=cy to
force a backend (cy raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from clinn import _match_py

try:
    from clinn import _match_cy
except ImportError:
    _match_cy = None

_forced = os.environ.get("CLINN_KERNEL", "").strip().lower()
if _forced == "py":
    BACKEND = "python"
    match_first = _match_py.match_first
elif _forced == "cy":
    if _match_cy is None:
        raise ImportError("CLINN_KERNEL=cy but the compiled kernel is not built")
    BACKEND = "cython"
    match_first = _match_cy.match_first
elif _match_cy is not None:
    BACKEND = "cython"
    match_first = _match_cy.match_first
else:
    BACKEND = "python"
    match_first = _match_py.match_first


def backends() -> dict[str, object]:
    """All importable kernels, keyed by name. Used by tests and benchmarks."""
    out: dict[str, object] = {"python": _match_py.match_first}
    if _match_cy is not None:
        out["cython"] = _match_cy.match_first
    return out

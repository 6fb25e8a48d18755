"""Kernel selection: compiled extension when available, pure Python otherwise.

Set CHRISIMOS_PURE=1 to force the fallback (used by the parity tests and
the implementation benchmark).
"""

import os

from . import _pure

greedy_cover_pure = _pure.greedy_cover
greedy_cover_native = None

if os.environ.get("CHRISIMOS_PURE") != "1":
    try:
        from . import _native  # type: ignore[attr-defined]

        greedy_cover_native = _native.greedy_cover
    except ImportError:
        pass

if greedy_cover_native is not None:
    greedy_cover = greedy_cover_native
    _IMPL = "native"
else:
    greedy_cover = greedy_cover_pure
    _IMPL = "pure"


def implementation() -> str:
    """Which greedy kernel is active: "native" or "pure"."""
    return _IMPL

"""Kernel selection: the compiled extension when importable, else pure Python.

Set TERMLEX_PURE_PYTHON=1 before import to force the fallback (used by the
parity tests and the benchmark).
"""

import os

if os.environ.get("TERMLEX_PURE_PYTHON"):
    from . import _match_py as _impl
else:
    try:
        from . import _match_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _match_py as _impl

IMPLEMENTATION: str = _impl.IMPLEMENTATION
compile_patterns = _impl.compile_patterns
match_spans = _impl.match_spans

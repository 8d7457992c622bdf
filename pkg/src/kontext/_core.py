"""Select the search kernel backend at import time.

The compiled extension is used when it was built; set ``KONTEXT_PURE_PYTHON=1``
to force the pure-Python implementation.
"""
from __future__ import annotations

import os

from . import _kernels_py

search_py = _kernels_py.search
count_py = _kernels_py.count

if os.environ.get("KONTEXT_PURE_PYTHON", "") not in ("", "0"):
    search, count = search_py, count_py
    BACKEND = "python"
    search_compiled = count_compiled = None
else:
    try:
        from ._kernels import count as count_compiled
        from ._kernels import search as search_compiled
    except ImportError:
        search_compiled = count_compiled = None
        search, count = search_py, count_py
        BACKEND = "python"
    else:
        search, count = search_compiled, count_compiled
        BACKEND = "cython"

"""Kernel backend selection.

The compiled extension is used when it has been built; otherwise the
pure-Python twins are used.  Setting ``AUTOGRP_PURE_PYTHON=1`` forces the
fallback.
"""

import os

from . import _pykernels

if os.environ.get("AUTOGRP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
partition_refine = _impl.partition_refine
reduce_word = _impl.reduce_word
scan_match = _impl.scan_match
trie_scan = _impl.trie_scan
build_index = _impl.build_index


def backends():
    """All importable kernel modules, keyed by backend name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found

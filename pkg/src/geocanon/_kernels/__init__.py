"""Digest kernel backend selection.

Prefers the compiled extension; falls back to the numpy reference
implementation. ``BACKEND`` records which one is active. Set the
environment variable ``GEOCANON_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import reference

if os.environ.get("GEOCANON_PURE_PYTHON"):
    _impl = reference
    BACKEND = "reference"
else:
    try:
        from . import _fastdigest as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = reference
        BACKEND = "reference"

SEED_ITEM = reference.SEED_ITEM
SEED_NODE = reference.SEED_NODE
SEED_EDGE = reference.SEED_EDGE
SEED_QUAD = reference.SEED_QUAD

hash_items = _impl.hash_items
multiset_sum = _impl.multiset_sum
fast_scan = _impl.fast_scan
general_scan = _impl.general_scan

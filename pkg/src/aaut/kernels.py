"""Backend selection for the hot kernels.

The compiled ``_speedups`` extension is used when it was built; otherwise the
pure-Python module is loaded.  Setting ``AAUT_PURE_PYTHON=1`` forces the
fallback.  Both backends expose the same functions and return equal values.
"""

import os

from . import _purekernels as pure

compiled = None
if os.environ.get("AAUT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _speedups as compiled
    except ImportError:
        compiled = None

_active = compiled if compiled is not None else pure

BACKEND = _active.BACKEND
leaf_prefix = _active.leaf_prefix
image = _active.image
extension_range = _active.extension_range
compose_pairs = _active.compose_pairs
reduce_pairs = _active.reduce_pairs
minimal_sorted = _active.minimal_sorted
theta_sweep = _active.theta_sweep

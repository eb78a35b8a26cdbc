"""Hot loops with a compiled core and a pure-Python fallback.

The compiled extension ``_speedups`` is used when it was built; otherwise,
or when ``LYNPERM_PURE=1`` is set in the environment, the functions come
from :mod:`lynperm.kernels.purepy`.  Both expose the same four functions.
"""
import os

from . import purepy

if os.environ.get("LYNPERM_PURE", "") not in ("", "0"):
    _impl = purepy
else:
    try:
        from . import _speedups as _impl
    except ImportError:  # extension not built
        _impl = purepy

BACKEND = _impl.NAME

pattern_rank = _impl.pattern_rank
count_patterns = _impl.count_patterns
flag_counts = _impl.flag_counts
multiset_pattern_ranks = _impl.multiset_pattern_ranks


def available_backends():
    """Map backend name to module for every backend importable here."""
    found = {purepy.NAME: purepy}
    try:
        from . import _speedups
    except ImportError:
        pass
    else:
        found[_speedups.NAME] = _speedups
    return found

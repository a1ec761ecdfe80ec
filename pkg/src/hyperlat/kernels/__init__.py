"""Hot numeric kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it imports; set ``HYPERLAT_PURE=1`` to
force the fallback.  ``BACKEND`` names the active implementation.
"""

import os

from . import _pykernels

if os.environ.get("HYPERLAT_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.NAME

min_dists = _impl.min_dists
profile_distance = _impl.profile_distance
radial_scan = _impl.radial_scan
transitivity_scan = _impl.transitivity_scan
triangle_scan = _impl.triangle_scan


def available_backends():
    """Map of backend name to module, for benchmarks and equivalence tests."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out

"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when
``MAXSTABLE_LAB_PURE=1`` is set, the numpy implementation is used.  Both
produce identical output.
"""

import os

from . import _pykernels

if os.environ.get("MAXSTABLE_LAB_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
renewal_visits = _impl.renewal_visits
partial_maxima = _impl.partial_maxima


def available_backends():
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found

"""Hot inner-loop kernels with backend selection at import time.

The compiled Cython core is used when it was built; otherwise (or when the
environment variable ``OINLSIM_PURE_PYTHON=1`` is set) the numpy reference
implementation is selected. Both backends have identical semantics and are
cross-checked in the test suite; ``benchmarks/bench_kernels.py`` compares
their speed.
"""

import os

from . import _reference

if os.environ.get("OINLSIM_PURE_PYTHON", "0") == "1":
    _impl = _reference
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND = "python"

local_phase_pair = _impl.local_phase_pair
local_decay = _impl.local_decay


def available_backends():
    """Map of backend name -> kernel module, for parity tests and benchmarks."""
    backends = {"python": _reference}
    try:
        from . import _core
        backends["compiled"] = _core
    except ImportError:
        pass
    return backends

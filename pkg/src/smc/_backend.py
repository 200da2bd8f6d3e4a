"""Select the window-feature kernel at import time.

The compiled extension is used when it was built; setting the environment
variable ``SMC_PURE_PYTHON=1`` forces the numpy fallback.
"""
import logging
import os

from . import _window_py
from .errors import InvalidInput

log = logging.getLogger(__name__)

_compiled = None
if not os.environ.get("SMC_PURE_PYTHON"):
    try:
        from . import _window_ext as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKENDS = {"python": _window_py.window_features}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.window_features

ACTIVE = "compiled" if "compiled" in BACKENDS else "python"
log.debug("window kernel backend: %s", ACTIVE)


def window_features(quantized, raw, size, stride, levels, offsets, backend=None):
    name = backend or ACTIVE
    try:
        fn = BACKENDS[name]
    except KeyError:
        raise InvalidInput(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
    return fn(quantized, raw, size, stride, levels, offsets)

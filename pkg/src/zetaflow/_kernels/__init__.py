"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python reference
implementation.  Set ``ZETAFLOW_PURE=1`` to force the fallback (used by the
benchmark and by tests checking backend agreement).
"""

import os

from . import pure

if os.environ.get("ZETAFLOW_PURE"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

flow_polynomial_1d = _impl.flow_polynomial_1d
trace_quadratic = _impl.trace_quadratic

FLOW_CAPTURED = pure.FLOW_CAPTURED
FLOW_ESCAPED = pure.FLOW_ESCAPED
FLOW_MAXLEN = pure.FLOW_MAXLEN
FLOW_STEPFAIL = pure.FLOW_STEPFAIL
TRAJ_HIT = pure.TRAJ_HIT
TRAJ_ESCAPED = pure.TRAJ_ESCAPED
TRAJ_MAXLEN = pure.TRAJ_MAXLEN
TRAJ_STEPFAIL = pure.TRAJ_STEPFAIL

"""Kernel selection: compiled extension when available, pure Python otherwise.

Set MIDASVOL_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the equivalence tests).
"""

import os

from . import _kernels_py

if os.environ.get("MIDASVOL_PURE_PYTHON"):
    _impl = _kernels_py
    HAS_COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        HAS_COMPILED = True
    except ImportError:
        _impl = _kernels_py
        HAS_COMPILED = False

gjr_recursion = _impl.gjr_recursion
garch_recursion = _impl.garch_recursion
dcc_recursion = _impl.dcc_recursion
gjr_simulate_block = _impl.gjr_simulate_block

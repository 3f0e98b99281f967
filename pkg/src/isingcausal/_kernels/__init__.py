"""Hot loops for Pauli-sum operators.

The compiled extension is used when it was built and importable; otherwise
the numpy fallback is selected.  Setting ``ISINGCAUSAL_PURE_PYTHON=1``
forces the fallback.
"""

import os

from . import _pauli_py

if os.environ.get("ISINGCAUSAL_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pauli_py
    BACKEND = "python"
else:
    try:
        from . import _pauli_ext as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pauli_py
        BACKEND = "python"

pauli_dense = _impl.pauli_dense
pauli_apply = _impl.pauli_apply

__all__ = ["BACKEND", "pauli_dense", "pauli_apply"]

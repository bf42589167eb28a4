"""Backend selection for the spin-elimination kernel.

The compiled extension is used when it imports; set ``SURFPORT_KERNEL=python``
to force the numpy fallback.
"""

import os

from . import _pykernel

contract_batch_python = _pykernel.contract_batch

try:
    if os.environ.get("SURFPORT_KERNEL", "").lower() == "python":
        raise ImportError("compiled kernel disabled by SURFPORT_KERNEL")
    from ._ckernel import contract_batch as contract_batch_compiled
except ImportError:
    contract_batch_compiled = None

if contract_batch_compiled is not None:
    contract_batch = contract_batch_compiled
    BACKEND = "cython"
else:
    contract_batch = contract_batch_python
    BACKEND = "python"

__all__ = ["contract_batch", "contract_batch_python", "contract_batch_compiled", "BACKEND"]

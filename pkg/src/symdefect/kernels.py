"""Selection between the compiled and the pure-NumPy system assembly.

The compiled extension is used when it imports; setting the environment
variable ``SYMDEFECT_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
assemble_system = _kernels_py.assemble_system

if os.environ.get("SYMDEFECT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        assemble_system = _compiled.assemble_system
        BACKEND = "cython"

__all__ = ["assemble_system", "BACKEND", "python_assemble_system"]

python_assemble_system = _kernels_py.assemble_system

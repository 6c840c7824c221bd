"""Backend selection for the hourly horizon loop.

The compiled extension is used when it imports; otherwise the pure-Python
twin. Setting ``PVBATT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernel_py

N_Q_COLS = _kernel_py.N_Q_COLS
N_TRACE_COLS = _kernel_py.N_TRACE_COLS

python_simulate_horizon = _kernel_py.simulate_horizon
compiled_simulate_horizon = None

try:
    from ._kernel import simulate_horizon as compiled_simulate_horizon
except ImportError:  # extension not built
    pass

if compiled_simulate_horizon is not None and os.environ.get("PVBATT_PURE_PYTHON", "") not in ("1", "true"):
    simulate_horizon = compiled_simulate_horizon
    BACKEND = "cython"
else:
    simulate_horizon = python_simulate_horizon
    BACKEND = "python"

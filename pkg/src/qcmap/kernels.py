"""Backend selection for the numeric hot loops.

The compiled extension ``qcmap._kernels_c`` is used when it imports; otherwise
the numpy implementation in ``qcmap._kernels_py`` takes over. Setting the
environment variable ``QCMAP_PURE_PYTHON=1`` forces the fallback.

Both backends expose the same four functions:

``jacobi_eigh(a, max_sweeps)``
    Cyclic Jacobi on a symmetric matrix; returns ``(w, v, sweeps)``.
``rk4_hamilton(h, g, x0, y0, dt, steps)``
    RK4 on ``x' = H y - g x, y' = -H x - g y``.
``verlet(s, q0, v0, dt, steps)``
    Velocity Verlet on ``q'' = -S q``.
``rk4_second_order(s, d, q0, v0, dt, steps)``
    RK4 on ``q'' = -S q - d q'``.

``steps`` is a strictly increasing int64 array of step indices to sample.
"""

import os

from . import _kernels_py as python

try:
    if os.environ.get("QCMAP_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _kernels_c as compiled
except ImportError:
    compiled = None

backend = compiled if compiled is not None else python
BACKEND = "compiled" if compiled is not None else "python"

AVAILABLE = {"python": python}
if compiled is not None:
    AVAILABLE["compiled"] = compiled


def use(name):
    """Switch the active backend (``"compiled"`` or ``"python"``)."""
    global backend, BACKEND
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} not available; have {sorted(AVAILABLE)}")
    backend = AVAILABLE[name]
    BACKEND = name


def jacobi_eigh(a, max_sweeps=50):
    return backend.jacobi_eigh(a, max_sweeps)


def rk4_hamilton(h, g, x0, y0, dt, steps):
    return backend.rk4_hamilton(h, g, x0, y0, dt, steps)


def verlet(s, q0, v0, dt, steps):
    return backend.verlet(s, q0, v0, dt, steps)


def rk4_second_order(s, d, q0, v0, dt, steps):
    return backend.rk4_second_order(s, d, q0, v0, dt, steps)

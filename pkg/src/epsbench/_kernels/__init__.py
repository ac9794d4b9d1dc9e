"""Kernel backend selection.

The compiled extension is preferred when it imports; otherwise the pure-numpy
reference takes over. ``EPSBENCH_PURE=1`` forces the fallback (used by the
benchmark and the backend-agreement tests).
"""

import os

from . import reference

if os.environ.get("EPSBENCH_PURE", "0") not in ("", "0"):
    backend = reference
    COMPILED = False
else:
    try:
        from . import _speedups as backend  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        backend = reference
        COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "pure"

simulate_path = backend.simulate_path
apply_transition = backend.apply_transition
power_sweeps = backend.power_sweeps
block_entropies = backend.block_entropies

__all__ = [
    "BACKEND_NAME",
    "COMPILED",
    "apply_transition",
    "backend",
    "block_entropies",
    "power_sweeps",
    "reference",
    "simulate_path",
]

"""Entrenchment model of opinion dynamics: lattice simulator and mean-field tools."""

import numba as _numba

# prefer OpenMP/workqueue; the bundled TBB may be too old and warns on first use
_numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

__version__ = "0.1.0"

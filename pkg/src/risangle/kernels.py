"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``RISANGLE_PURE_PYTHON`` is set to a non-empty value,
the numpy/pure-Python fallback is used. Both expose the same four functions.
"""
import os

if os.environ.get("RISANGLE_PURE_PYTHON"):
    from risangle import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from risangle import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from risangle import _kernels_py as _impl

        BACKEND = "python"

gamma_scalar = _impl.gamma_scalar
gamma_array = _impl.gamma_array
solve_capacitance = _impl.solve_capacitance
array_factor_power = _impl.array_factor_power

__all__ = ["BACKEND", "gamma_scalar", "gamma_array", "solve_capacitance", "array_factor_power"]

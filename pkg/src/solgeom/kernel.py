"""Backend selection for the geodesic-flow kernel.

The compiled extension is preferred; the pure-Python module is used when it
cannot be imported.  :func:`use_backend` switches explicitly (tests and the
benchmark use it to compare the two).
"""

from . import _kernel_py

try:
    from . import _kernel as _kernel_native
except ImportError:  # extension not built
    _kernel_native = None

_BACKENDS = {"python": _kernel_py}
if _kernel_native is not None:
    _BACKENDS["native"] = _kernel_native

_active = _BACKENDS.get("native", _kernel_py)


def available_backends():
    """Names of the importable backends, preferred first."""
    return sorted(_BACKENDS, key=lambda n: n != "native")


def active_backend():
    """Name of the backend currently used by :func:`propagate`."""
    return "native" if _active is _kernel_native else "python"


def use_backend(name):
    """Select a backend by name (``"native"`` or ``"python"``).

    Returns the previously active name so callers can restore it.
    """
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    previous = active_backend()
    _active = _BACKENDS[name]
    return previous


def propagate(a, b, state0, t_out, rtol, atol, max_steps):
    """Dispatch to the active backend; see ``_kernel_py.propagate``."""
    return _active.propagate(a, b, state0, t_out, rtol, atol, max_steps)

import importlib
import sys

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from solgeom import _kernel_py, kernel
from solgeom.flow import spec_from_kh
from solgeom.invariants import invariant_set


def _rhs(a, b):
    def f(_t, s):
        ep, em = np.exp(2 * s[2]), np.exp(-2 * s[2])
        return [a * ep, b * em, s[3], -a * a * ep + b * b * em]

    return f


@pytest.mark.parametrize("k", [0.3, 0.6, 0.9])
def test_matches_scipy_dop853(backend, k):
    spec = spec_from_kh(k, 0.4, 0.2)
    T = invariant_set(k).T
    times = np.linspace(0.0, 2 * T, 41)
    out, steps, status = kernel.propagate(spec.a, spec.b, spec.initial_state, times, 1e-12, 1e-12, 10**6)
    ref = solve_ivp(_rhs(spec.a, spec.b), (0, 2 * T), spec.initial_state, method="DOP853",
                    t_eval=times, rtol=1e-13, atol=1e-13).y.T
    assert status == 0 and steps > 0
    assert np.max(np.abs(out - ref)) <= 1e-10


def test_backends_agree():
    if len(kernel.available_backends()) < 2:
        pytest.skip("compiled kernel not built")
    spec = spec_from_kh(0.75, -0.3, 0.5)
    times = np.linspace(0.0, 15.0, 57)
    outs = []
    previous = kernel.active_backend()
    for name in kernel.available_backends():
        kernel.use_backend(name)
        outs.append(kernel.propagate(spec.a, spec.b, spec.initial_state, times, 1e-12, 1e-12, 10**6))
    kernel.use_backend(previous)
    (o1, n1, s1), (o2, n2, s2) = outs
    assert s1 == s2 == 0 and n1 == n2
    assert np.max(np.abs(o1 - o2)) <= 1e-13


def test_first_sample_is_initial_state(backend):
    state = (0.1, -0.2, 0.3, 0.4)
    out, _, _ = kernel.propagate(0.5, 0.3, state, [0.0, 1.0], 1e-10, 1e-10, 10**5)
    assert tuple(out[0]) == state


def test_step_budget_exhaustion(backend):
    spec = spec_from_kh(0.6)
    times = np.linspace(0.0, 50.0, 11)
    out, steps, status = kernel.propagate(spec.a, spec.b, spec.initial_state, times, 1e-12, 1e-12, 5)
    assert status == _kernel_py.STATUS_MAX_STEPS
    assert steps == 5
    assert np.isnan(out[-1]).all()
    assert not np.isnan(out[0]).any()


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernel.use_backend("fortran")


def test_use_backend_returns_previous():
    name = kernel.active_backend()
    assert kernel.use_backend("python") == name
    assert kernel.use_backend(name) == "python"


def test_fallback_when_extension_missing(monkeypatch):
    import solgeom

    monkeypatch.setitem(sys.modules, "solgeom._kernel", None)
    monkeypatch.delattr(solgeom, "_kernel", raising=False)
    reloaded = importlib.reload(kernel)
    try:
        assert reloaded.available_backends() == ["python"]
        assert reloaded.active_backend() == "python"
    finally:
        monkeypatch.undo()
        importlib.reload(kernel)


def test_span_below_time_resolution(backend):
    out, _, status = kernel.propagate(0.5, 0.5, (0.0, 0.0, 0.0, 0.5), [0.0, 5e-324], 1e-12, 1e-12, 100)
    assert status == 0
    assert np.array_equal(out[1], out[0])

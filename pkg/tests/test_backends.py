"""The compiled and pure-Python kernels must agree."""

import importlib

import numpy as np
import pytest

from tsbaselines import _kernels_py

try:
    from tsbaselines import _kernels
except ImportError:
    _kernels = None

BACKENDS = [_kernels_py] + ([_kernels] if _kernels is not None else [])

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.BACKEND_NAME)
class TestEachBackend:
    def test_dtw_identity(self, impl):
        x = np.array([1.0, 2.0, 3.0])
        assert impl.dtw_cost(x, x) == 0.0

    def test_thinning_respects_window(self, impl, rng):
        exp_draws = rng.standard_exponential(512)
        unif = rng.random(512)
        out = np.empty(512)
        n, used, t, a, done = impl.hawkes_thinning(
            2.0, 0.5, 1.0, 0.0, 0.0, 10.0, exp_draws, unif, out
        )
        assert done and used <= 512
        assert np.all(out[:n] < 10.0)
        assert np.all(np.diff(out[:n]) >= 0)


@needs_ext
class TestEquivalence:
    def test_dtw_cost(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 40))
            m = int(rng.integers(1, 40))
            x = rng.uniform(0, 5, size=n)
            y = rng.uniform(0, 5, size=m)
            assert _kernels.dtw_cost(x, y) == pytest.approx(
                _kernels_py.dtw_cost(x, y), abs=1e-12
            )

    def test_hawkes_suffstats(self, rng):
        times = np.sort(rng.uniform(0, 200, size=500))
        for window in (5.0, 50.0, 1e9):
            a = _kernels.hawkes_suffstats(times, 0.7, 0.4, 1.2, window)
            b = _kernels_py.hawkes_suffstats(times, 0.7, 0.4, 1.2, window)
            assert a == pytest.approx(b, rel=1e-11)

    def test_hawkes_loglik(self, rng):
        times = np.sort(rng.uniform(0, 300, size=800))
        a = _kernels.hawkes_loglik(times, 300.0, 0.5, 0.5, 1.0)
        b = _kernels_py.hawkes_loglik(times, 300.0, 0.5, 0.5, 1.0)
        assert a == pytest.approx(b, abs=1e-9)

    def test_thinning_bitwise_identical(self, rng):
        exp_draws = rng.standard_exponential(2048)
        unif = rng.random(2048)
        out_a = np.empty(2048)
        out_b = np.empty(2048)
        res_a = _kernels.hawkes_thinning(1.0, 0.6, 2.0, 3.0, 0.0, 50.0, exp_draws, unif, out_a)
        res_b = _kernels_py.hawkes_thinning(1.0, 0.6, 2.0, 3.0, 0.0, 50.0, exp_draws, unif, out_b)
        assert res_a[0] == res_b[0] and res_a[1] == res_b[1]
        assert res_a[2] == res_b[2] and res_a[3] == res_b[3] and res_a[4] == res_b[4]
        assert np.array_equal(out_a[: res_a[0]], out_b[: res_b[0]])

    def test_empty_inputs(self):
        empty = np.zeros(0)
        assert _kernels.hawkes_suffstats(empty, 1.0, 0.5, 1.0, 10.0) == (0.0, 0.0, 0.0)
        assert _kernels_py.hawkes_suffstats(empty, 1.0, 0.5, 1.0, 10.0) == (0.0, 0.0, 0.0)
        assert _kernels.hawkes_loglik(empty, 5.0, 1.0, 0.5, 1.0) == pytest.approx(-5.0)
        assert _kernels_py.hawkes_loglik(empty, 5.0, 1.0, 0.5, 1.0) == pytest.approx(-5.0)


def test_backend_selection_env(monkeypatch):
    import tsbaselines._backend as backend

    monkeypatch.setenv("TSBASELINES_PURE", "1")
    reloaded = importlib.reload(backend)
    try:
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("TSBASELINES_PURE")
        importlib.reload(backend)

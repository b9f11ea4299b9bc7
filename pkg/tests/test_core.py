import numpy as np
import pytest

from timerev.core import EvaluationGrid, RngStream, Series, default_grid, make_grid, parse_grid


def test_default_grid_shape():
    g = default_grid()
    assert g.lambdas.size == 17
    assert g.taus.size == 31
    assert g.size == 16337


def test_default_grid_endpoints():
    g = default_grid()
    assert g.lambdas[0] == 0.0
    assert g.lambdas[16] == np.pi
    assert g.taus[0] == 1 / 32
    assert g.taus[-1] == 31 / 32
    np.testing.assert_array_equal(g.lambdas, 2 * np.pi * np.arange(17) / 32)


def test_make_grid_matches_default():
    assert make_grid(17, 31) == default_grid()
    a, b = make_grid(9, 7), make_grid(9, 7)
    assert a.lambdas.tobytes() == b.lambdas.tobytes()
    assert a.taus.tobytes() == b.taus.tobytes()


def test_minimal_and_quartile_grids():
    g = make_grid(2, 1)
    np.testing.assert_array_equal(g.lambdas, [0.0, np.pi])
    np.testing.assert_array_equal(g.taus, [0.5])
    np.testing.assert_array_equal(make_grid(3, 3).taus, [0.25, 0.5, 0.75])


@pytest.mark.parametrize("args", [(1, 5), (0, 3), (5, 0), (-2, 3)])
def test_make_grid_rejects_bad_counts(args):
    with pytest.raises(ValueError):
        make_grid(*args)


@pytest.mark.parametrize("lam,tau", [([0, 4.0], [0.5]), ([0, 1], [0.0]), ([1, 0.5], [0.5])])
def test_grid_validation(lam, tau):
    with pytest.raises(ValueError):
        EvaluationGrid(lam, tau)


def test_grid_axes_strictly_increasing():
    g = make_grid(33, 63)
    assert np.all(np.diff(g.lambdas) > 0)
    assert np.all(np.diff(g.taus) > 0)


def test_grid_is_immutable():
    g = default_grid()
    with pytest.raises(ValueError):
        g.lambdas[0] = 1.0


def test_parse_grid():
    assert parse_grid("17x31") == default_grid()
    with pytest.raises(ValueError):
        parse_grid("17-31")


def test_series_validation():
    with pytest.raises(ValueError):
        Series([1.0])
    with pytest.raises(ValueError):
        Series([1.0, np.nan, 2.0])
    with pytest.raises(ValueError):
        Series([1.0, np.inf])
    s = Series([1, 2, 3], label="x", interval="yearly")
    assert s.n == 3
    np.testing.assert_array_equal(s.reversed().values, [3, 2, 1])


def test_rng_stream_reproducible():
    a = RngStream(123, 4).generator().random(10)
    b = RngStream(123, 4).generator().random(10)
    c = RngStream(123, 5).generator().random(10)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    np.testing.assert_array_equal(RngStream(1, (2, 3)).generator().random(3),
                                  RngStream(1, 2).child(3).generator().random(3))

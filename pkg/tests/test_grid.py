import numpy as np
import pytest

from genharnack.grid import GridFunction


def test_csv_round_trip_1d():
    u = GridFunction.from_function(np.sin, -1.0, 1.0, 21)
    v = GridFunction.from_csv(u.to_csv())
    assert np.array_equal(u.values, v.values)
    assert v.h == u.h and v.origin == u.origin and not v.log_domain


def test_csv_round_trip_2d_rectangular(tmp_path):
    u = GridFunction(np.arange(12.0).reshape(3, 4) / 7, 0.1, origin=(-0.3, 0.2), log_domain=True)
    path = tmp_path / "u.csv"
    u.save_csv(path)
    v = GridFunction.load_csv(path)
    assert v.values.shape == (3, 4)
    assert np.array_equal(u.values, v.values)
    assert v.log_domain


def test_csv_without_shape_column_is_square():
    text = "dim,origin,h,log_domain\n2,0.0 0.0,0.5,0\n" + "".join(f"{i}\n" for i in range(9))
    assert GridFunction.from_csv(text).values.shape == (3, 3)


@pytest.mark.parametrize("text", ["", "a,b\n1,2\n", "dim,origin,h,log_domain,shape\n1,0.0,0.1,0,3\n1\n2\n"])
def test_bad_csv_rejected(text):
    with pytest.raises(ValueError):
        GridFunction.from_csv(text)


def test_log_and_linear_views():
    u = GridFunction.from_function(lambda x: x, -1.0, 1.0, 5, log_domain=True)
    assert np.allclose(u.linear_values(), np.exp(u.coords(0)))
    assert np.array_equal(u.log_values(), u.values)

import numpy as np
import pytest

from cubecover.sobol import MAX_DIMENSION, sobol_points


def test_dimension_one_is_van_der_corput():
    pts = sobol_points(1, 4).ravel()
    assert pts.tolist() == [0.0, 0.5, 0.75, 0.25]


def test_origin_is_first_point():
    assert np.all(sobol_points(10, 1) == 0.0)


@pytest.mark.parametrize("d", [1, 2, 3, 8, 21, 37, 50])
def test_matches_scipy_reference(d):
    qmc = pytest.importorskip("scipy.stats.qmc")
    ref = qmc.Sobol(d, scramble=False).random(2048)
    assert np.array_equal(sobol_points(d, 2048), ref)


def test_skip_drops_prefix():
    full = sobol_points(6, 200)
    assert np.array_equal(sobol_points(6, 150, skip=50), full[50:])


def test_deterministic():
    assert np.array_equal(sobol_points(12, 500), sobol_points(12, 500))


def test_one_dimensional_net_property():
    # first 2^m points: every dyadic interval of length 2^-m holds exactly one
    m = 10
    pts = sobol_points(10, 2**m)
    for j in range(pts.shape[1]):
        cells = np.floor(pts[:, j] * 2**m).astype(int)
        assert sorted(cells) == list(range(2**m))


def test_projection_gap_bound():
    pts = sobol_points(10, 2**10)
    for j in range(10):
        xs = np.sort(pts[:, j])
        gaps = np.diff(np.concatenate([[0.0], xs, [1.0]]))
        assert gaps.max() < 2.0**-9


def test_rejects_unsupported_dimension():
    with pytest.raises(ValueError, match="unsupported dimension"):
        sobol_points(MAX_DIMENSION + 1, 4)


def test_rejects_index_overflow():
    with pytest.raises(ValueError):
        sobol_points(2, 2, skip=2**31 - 1)


def test_rejects_bad_counts():
    with pytest.raises(ValueError):
        sobol_points(2, 0)
    with pytest.raises(ValueError):
        sobol_points(0, 4)

import numpy as np
import pytest

from controllers.boolean_controller import fwht
from models.boolean import BoolFun
from utils.errors import ConfigError

# Inputs in table order: x_1 is the most significant bit
BITS3 = [[(i >> 2) & 1, (i >> 1) & 1, i & 1] for i in range(8)]


def parity(n):
    return BoolFun(n, [(-1.0) ** bin(i).count("1") for i in range(2 ** n)])


def test_fwht_matches_dense_hadamard():
    values = np.arange(8, dtype=float)
    H2 = np.array([[1, 1], [1, -1]])
    H8 = np.kron(np.kron(H2, H2), H2)
    np.testing.assert_allclose(fwht(values), H8 @ values)


def test_walsh_of_parity_is_top_character(booleans):
    coefficients = booleans.bool_walsh(parity(3))
    expected = np.zeros(8)
    expected[7] = 1.0
    np.testing.assert_allclose(coefficients, expected, atol=1e-12)


@pytest.mark.parametrize("table, k", [
    ([0, 0, 0, 0, 0, 0, 0, 1], 3),
    ([(-1.0) ** (b[0] + b[1] + b[2]) for b in BITS3], 3),
    ([float(b[0]) for b in BITS3], 1),
    ([float(b[0] and b[1]) for b in BITS3], 2),
    ([2.5] * 8, 0),
])
def test_locality(booleans, table, k):
    assert booleans.locality(BoolFun(3, table)) == k


def test_klocal_check(booleans):
    conjunction = BoolFun(3, [0, 0, 0, 0, 0, 0, 0, 1])
    assert not booleans.bool_klocal_check(conjunction, 2)
    assert booleans.bool_klocal_check(conjunction, 3)


def test_reduce_r_examples(booleans):
    # f(x1, x2) = x1 x2 -> Rf(x1) = f(x1, 0) - f(x1, 1) = -x1
    reduced = booleans.bool_reduce_R(BoolFun(2, [0, 0, 0, 1]))
    np.testing.assert_allclose(reduced.table, [0.0, -1.0])
    # Parity on 2 bits -> Rf(x1) = 2 (-1)^{x1}
    np.testing.assert_allclose(booleans.bool_reduce_R(parity(2)).table, [2.0, -2.0])


def test_reduce_r_iterated_matches_repeated_application(booleans, rng):
    f = BoolFun(4, rng.normal(size=16))
    twice = booleans.bool_reduce_R(booleans.bool_reduce_R(f))
    np.testing.assert_allclose(booleans.bool_reduce_R_iter(f, 2).table, twice.table, atol=1e-12)
    np.testing.assert_allclose(booleans.bool_reduce_R_iter(f, 0).table, f.table)
    with pytest.raises(ConfigError):
        booleans.bool_reduce_R_iter(f, 5)


def test_reduce_r_lowers_locality_by_one(booleans, rng):
    for _ in range(10):
        f = BoolFun(4, rng.normal(size=16))
        assert booleans.locality(booleans.bool_reduce_R(f)) <= booleans.locality(f) - 1 or booleans.locality(f) == 0


def test_proof_function_table(booleans):
    f = booleans.bool_proof_function(3, 3, 2)
    np.testing.assert_allclose(f.table, [1, 0, 0, 0, -1, 0, 0, 0])
    assert f((0, 0, 0)) == 1.0
    assert f((1, 0, 0)) == -1.0
    assert booleans.locality(f) == 3
    assert booleans.locality(booleans.bool_reduce_R(f)) == 2


@pytest.mark.parametrize("n, k, k_prime", [(3, 3, 2), (4, 3, 1), (5, 4, 2), (6, 6, 3)])
def test_separation_bound_of_proof_function(booleans, n, k, k_prime):
    f = booleans.bool_proof_function(n, k, k_prime)
    assert booleans.locality(f) == k
    assert booleans.bool_separation_bound(f, k_prime) == pytest.approx(2.0 ** -k_prime)


@pytest.mark.parametrize("n, k, k_prime", [(3, 3, 2), (4, 3, 1), (5, 4, 2)])
def test_minimax_respects_separation_bound(booleans, n, k, k_prime):
    f = booleans.bool_proof_function(n, k, k_prime)
    result = booleans.bool_minimax(f, k_prime)
    assert result["distance"] >= booleans.bool_separation_bound(f, k_prime) - 1e-6
    approximant = result["approximant"]
    assert booleans.locality(approximant, tol=1e-7) <= k_prime
    assert np.max(np.abs(f.table - approximant.table)) == pytest.approx(result["distance"], abs=1e-6)


def test_minimax_of_parity_is_one(booleans):
    f = parity(3)
    assert booleans.bool_minimax(f, 2)["distance"] == pytest.approx(1.0, abs=1e-7)
    assert booleans.bool_separation_bound(f, 2) == pytest.approx(1.0)


def test_minimax_of_local_function_is_zero(booleans):
    f = BoolFun(3, [float(b[0] + 2 * b[2]) for b in BITS3])
    assert booleans.bool_minimax(f, 1)["distance"] == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize("n, k, k_prime", [(3, 2, 2), (3, 4, 2), (3, 3, 0)])
def test_proof_function_rejects_bad_parameters(booleans, n, k, k_prime):
    with pytest.raises(ConfigError):
        booleans.bool_proof_function(n, k, k_prime)


def test_minimax_size_limit(booleans):
    with pytest.raises(ConfigError):
        booleans.bool_minimax(BoolFun(11, np.zeros(2 ** 11)), 2)


def test_table_length_must_match():
    with pytest.raises(ConfigError):
        BoolFun(3, [0.0] * 7)

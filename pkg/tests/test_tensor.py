import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hspectral.problems import problem1, problem3, problem4, problem4_variant
from hspectral.tensor import (
    DenseTensor,
    Irreducibility,
    TensorError,
    check_feasible,
    check_size,
    contract_to_matrix,
    contract_to_scalar,
    contract_to_vector,
    dumps,
    identity_tensor,
    is_irreducible,
    loads,
    new_dense,
    normalize_to_feasible,
    read_tensor,
    scale_by_max,
    write_tensor,
)
from hspectral.tensor import _irreducible_exact, _irreducible_graph

P1_ROW = 4 / math.sqrt(3) + 4


def brute_vector(A, x):
    """Sum over every multi-index, independent of the matmul contraction."""
    n, m = A.dim, A.order
    out = np.zeros(n)
    for idx in np.ndindex(*(n,) * m):
        out[idx[0]] += A.data[idx] * np.prod([x[j] for j in idx[1:]])
    return out


def brute_reducible(A):
    """Reducing subsets by the definition, over every proper nonempty I."""
    n, m = A.dim, A.order
    found = []
    for mask in range(1, 2**n - 1):
        I = [i for i in range(n) if mask >> i & 1]
        out = [i for i in range(n) if not mask >> i & 1]
        if all(A.data[(i,) + rest] == 0 for i in I for rest in np.ndindex(*(n,) * (m - 1))
               if all(r in out for r in rest)):
            found.append(tuple(i + 1 for i in I))
    return found


class TestConstruction:
    def test_problem4_entries(self):
        A = new_dense(3, 3, {(1, 1, 1): 1, (1, 3, 3): 1, (2, 1, 1): 1, (3, 1, 1): 1})
        assert A == problem4()
        assert A[1, 3, 3] == 1.0 and A[1, 2, 2] == 0.0
        assert sorted(A.nonzeros()) == [((1, 1, 1), 1.0), ((1, 3, 3), 1.0), ((2, 1, 1), 1.0), ((3, 1, 1), 1.0)]

    def test_empty_is_zero(self):
        A = new_dense(2, 2, {})
        assert A.data.shape == (2, 2) and np.all(A.data == 0)

    def test_negative_entry_rejected(self):
        with pytest.raises(TensorError):
            new_dense(4, 2, {(1, 2, 1, 2): -1})

    @pytest.mark.parametrize("entries", [
        [((1, 1, 3), 1.0)],
        [((0, 1, 1), 1.0)],
        [((1, 1), 1.0)],
        [((1, 1, 1), 1.0), ((1, 1, 1), 2.0)],
        [((1, 1, 1), float("nan"))],
    ])
    def test_bad_entries(self, entries):
        with pytest.raises(TensorError):
            new_dense(3, 2, entries)

    def test_size_cap(self):
        check_size(3, 400)
        with pytest.raises(TensorError, match="cap"):
            check_size(5, 40)
        with pytest.raises(TensorError):
            check_size(1, 3)

    def test_data_is_read_only(self):
        A = problem4()
        with pytest.raises(ValueError):
            A.data[0, 0, 0] = 5.0

    def test_non_cubical_rejected(self):
        with pytest.raises(TensorError):
            DenseTensor(np.ones((2, 3)))

    def test_identity(self):
        I = identity_tensor(3, 2)
        assert I[1, 1, 1] == 1 and I[2, 2, 2] == 1 and I.data.sum() == 2


class TestContractions:
    def test_problem4_vector(self):
        np.testing.assert_array_equal(contract_to_vector(problem4(), np.ones(3)), [2, 1, 1])

    def test_problem4_scalar(self):
        assert contract_to_scalar(problem4(), np.ones(3)) == 4

    def test_problem4_matrix(self):
        M = contract_to_matrix(problem4(), np.ones(3))
        np.testing.assert_array_equal(M, [[1, 0, 1], [1, 0, 0], [1, 0, 0]])

    def test_problem1(self):
        A = problem1()
        np.testing.assert_allclose(contract_to_vector(A, np.ones(2)), [P1_ROW, P1_ROW], rtol=1e-15)
        assert contract_to_scalar(A, np.ones(2)) == pytest.approx(2 * P1_ROW, rel=1e-15)
        assert contract_to_scalar(A, np.ones(2)) == pytest.approx(12.6188, abs=1e-4)
        M = contract_to_matrix(A, np.ones(2))
        np.testing.assert_array_equal(M, M.T)

    def test_identity(self):
        rng = np.random.default_rng(0)
        for m in (2, 3, 4):
            I = identity_tensor(m, 4)
            x = rng.uniform(0.1, 2, 4)
            np.testing.assert_allclose(contract_to_vector(I, x), x ** (m - 1), rtol=1e-15)
            assert contract_to_scalar(I, x) == pytest.approx(np.sum(x**m), rel=1e-14)
            np.testing.assert_allclose(contract_to_matrix(I, x), np.diag(x ** (m - 2)), rtol=1e-15)

    def test_zero_tensor(self):
        assert contract_to_scalar(new_dense(3, 3), np.array([0.3, 1.0, 2.0])) == 0

    def test_shape_mismatch(self):
        with pytest.raises(TensorError):
            contract_to_vector(problem4(), np.ones(2))

    @settings(max_examples=60, deadline=None)
    @given(m=st.integers(2, 4), n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
    def test_matches_brute_force(self, m, n, seed):
        rng = np.random.default_rng(seed)
        A = DenseTensor(rng.random((n,) * m))
        x = rng.random(n)
        v = contract_to_vector(A, x)
        np.testing.assert_allclose(v, brute_vector(A, x), rtol=1e-12, atol=1e-14)
        assert contract_to_scalar(A, x) == pytest.approx(float(x @ v), rel=1e-12, abs=1e-14)
        np.testing.assert_allclose(contract_to_matrix(A, x) @ x, v, rtol=1e-12, atol=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(m=st.integers(2, 4), n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1),
           c=st.floats(0.01, 100))
    def test_homogeneity(self, m, n, seed, c):
        rng = np.random.default_rng(seed)
        A = DenseTensor(rng.random((n,) * m))
        x = rng.random(n)
        np.testing.assert_allclose(contract_to_vector(A, c * x), c ** (m - 1) * contract_to_vector(A, x),
                                   rtol=1e-12, atol=1e-300)

    @settings(max_examples=40, deadline=None)
    @given(m=st.integers(2, 4), n=st.integers(2, 4), seed=st.integers(0, 2**32 - 1))
    def test_permutation_covariance(self, m, n, seed):
        rng = np.random.default_rng(seed)
        A = DenseTensor(rng.random((n,) * m))
        x = rng.random(n)
        perm = rng.permutation(n)
        np.testing.assert_allclose(contract_to_vector(A.permuted(perm), x[perm]),
                                   contract_to_vector(A, x)[perm], rtol=1e-12)


class TestScalingAndFeasibility:
    def test_scale_problem1(self):
        s = scale_by_max(problem1())
        assert s.scale == pytest.approx(4 / math.sqrt(3)) and s.scale == pytest.approx(2.309401, abs=1e-6)
        assert s.tensor.data.max() == 1.0

    def test_scale_problem3(self):
        assert scale_by_max(problem3()).scale == 37

    def test_scale_unit_max(self):
        A = problem4()
        s = scale_by_max(A)
        assert s.scale == 1 and s.tensor == A

    def test_scale_zero(self):
        with pytest.raises(TensorError):
            scale_by_max(new_dense(3, 2))

    def test_normalize(self):
        np.testing.assert_allclose(normalize_to_feasible([1, 1], 4), [2**-0.25] * 2, rtol=1e-15)
        np.testing.assert_allclose(normalize_to_feasible([1, 1, 1], 3), [3 ** (-1 / 3)] * 3, rtol=1e-15)
        np.testing.assert_allclose(normalize_to_feasible([2, 1], 3), np.array([2, 1]) / 9 ** (1 / 3), rtol=1e-15)

    @pytest.mark.parametrize("x", [[1, 0], [1, -1], [1, np.inf]])
    def test_normalize_rejects(self, x):
        with pytest.raises(TensorError):
            normalize_to_feasible(x, 3)

    def test_check_feasible(self):
        check_feasible(normalize_to_feasible([3.0, 1.0, 0.2], 3), 3)
        with pytest.raises(TensorError):
            check_feasible([1.0, 1.0], 3)


class TestIrreducibility:
    def test_problem4_as_listed_is_reducible(self):
        # I = {1, 3} only needs a_122 = a_322 = 0, which holds for the listed entries.
        r = is_irreducible(problem4())
        assert r.status is Irreducibility.REDUCIBLE and r.witness == (1, 3)
        assert brute_reducible(problem4()) == [(1, 3)]

    def test_problem4_variant(self):
        assert is_irreducible(problem4_variant()).status is Irreducibility.IRREDUCIBLE
        assert brute_reducible(problem4_variant()) == []

    def test_problem3(self):
        assert is_irreducible(problem3())

    def test_single_entry(self):
        r = is_irreducible(new_dense(3, 2, {(2, 1, 1): 1}))
        assert r.status is Irreducibility.REDUCIBLE and r.witness == (1,)

    def test_identity(self):
        r = is_irreducible(identity_tensor(3, 4))
        assert r.status is Irreducibility.REDUCIBLE
        assert r.witness in brute_reducible(identity_tensor(3, 4))

    def test_positive_tensor(self):
        assert is_irreducible(DenseTensor(np.ones((3, 3, 3))))

    @settings(max_examples=80, deadline=None)
    @given(m=st.integers(2, 3), n=st.integers(2, 4), seed=st.integers(0, 2**32 - 1),
           density=st.floats(0.05, 0.5))
    def test_exact_matches_definition(self, m, n, seed, density):
        rng = np.random.default_rng(seed)
        A = DenseTensor(np.where(rng.random((n,) * m) < density, 1.0, 0.0))
        found = brute_reducible(A)
        r = _irreducible_exact(A)
        if found:
            assert r.status is Irreducibility.REDUCIBLE and r.witness in found
        else:
            assert r.status is Irreducibility.IRREDUCIBLE

    @settings(max_examples=80, deadline=None)
    @given(m=st.integers(2, 3), n=st.integers(2, 5), seed=st.integers(0, 2**32 - 1),
           density=st.floats(0.05, 0.6))
    def test_graph_certificates_are_sound(self, m, n, seed, density):
        rng = np.random.default_rng(seed)
        A = DenseTensor(np.where(rng.random((n,) * m) < density, 1.0, 0.0))
        exact = _irreducible_exact(A)
        g = _irreducible_graph(A)
        if g.status is Irreducibility.IRREDUCIBLE:
            assert exact.status is Irreducibility.IRREDUCIBLE
        elif g.status is Irreducibility.REDUCIBLE:
            assert g.witness in brute_reducible(A)

    def test_large_dimension_uses_graph(self):
        n = 20
        data = np.zeros((n, n, n))
        for i in range(n):
            data[i, (i + 1) % n, (i + 1) % n] = 1.0
        r = is_irreducible(DenseTensor(data))
        assert r.status is Irreducibility.IRREDUCIBLE and not r.exact
        data = np.zeros((n, n, n))
        data[:, 0, 0] = 1.0
        r = is_irreducible(DenseTensor(data))
        assert r.status is Irreducibility.REDUCIBLE and r.witness == (1,)


class TestTextFormat:
    def test_round_trip(self, tmp_path):
        A = problem1()
        path = tmp_path / "p1.txt"
        write_tensor(A, path)
        assert read_tensor(path) == A

    def test_parse(self):
        A = loads("# problem 4\n3 3\n1 1 1 1\n1 3 3 1.0\n\n2 1 1 1\n3 1 1 1\n")
        assert A == problem4()

    def test_random_round_trip(self):
        A = DenseTensor(np.random.default_rng(3).random((3, 3, 3)))
        assert loads(dumps(A)) == A

    @pytest.mark.parametrize("text", ["", "3\n", "3 2\n1 1 1\n", "3 2\n1 1 x 1.0\n", "3 2\n1 1 1 -2\n"])
    def test_malformed(self, text):
        with pytest.raises(TensorError):
            loads(text)

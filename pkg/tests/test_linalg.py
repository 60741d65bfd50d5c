"""Core linear algebra: eigendecomposition, matching, Pfaffian, line fits."""

import numpy as np
import pytest

from nhmetric.errors import (
    AmbiguousMatchWarning,
    DefectiveMatrixWarning,
    DegenerateAbscissaError,
    NotSkewSymmetricError,
)
from nhmetric.linalg import EigenSystem, eig_right, fit_linear, match_states, pfaffian


def random_complex(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def random_skew(rng, n, real=False):
    m = rng.normal(size=(n, n))
    if not real:
        m = m + 1j * rng.normal(size=(n, n))
    return m - m.T


def pfaffian_combinatorial(a):
    """Reference Pfaffian by recursive expansion along the first row."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n % 2:
        return 0.0 + 0j
    if n == 2:
        return complex(a[0, 1])
    total = 0.0 + 0j
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [i for i in rest if i != j]
        minor = a[np.ix_(keep, keep)]
        total += (-1) ** pos * a[0, j] * pfaffian_combinatorial(minor)
    return total


class TestEigRight:
    def test_diagonal_ordering(self):
        es = eig_right(np.diag([3.0, 1.0 + 2.0j, 1.0]))
        assert np.allclose(es.eigenvalues, [1.0, 1.0 + 2.0j, 3.0])
        # vectors are permuted identity columns
        assert np.allclose(np.abs(es.vectors), np.eye(3)[:, [2, 1, 0]])

    def test_nonreciprocal_two_site_cell(self):
        # hand solve of [[0, e^h], [e^-h, 0]]: eigenvalues +-1,
        # eigenvector for +1 proportional to (e^{h/2}, e^{-h/2})
        h = 0.5
        H = np.array([[0.0, np.exp(h)], [np.exp(-h), 0.0]])
        es = eig_right(H)
        assert np.allclose(es.eigenvalues, [-1.0, 1.0], atol=1e-12)
        expect = np.array([np.exp(h / 2), np.exp(-h / 2)])
        expect = expect / np.linalg.norm(expect)
        v = es.vectors[:, 1]
        phase = v[0] / expect[0]
        assert np.allclose(v, phase * expect, atol=1e-12)

    def test_jordan_block_warns(self):
        with pytest.warns(DefectiveMatrixWarning):
            eig_right(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_rejects_nonsquare_and_nonfinite(self):
        with pytest.raises(ValueError):
            eig_right(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            eig_right(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_trace_and_residual_random(self):
        rng = np.random.default_rng(7)
        for n in (2, 5, 17, 64):
            H = random_complex(rng, n)
            es = eig_right(H)
            assert abs(np.sum(es.eigenvalues) - np.trace(H)) < 1e-8 * abs(np.trace(H)) + 1e-8
            resid = H @ es.vectors - es.vectors * es.eigenvalues[None, :]
            assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(H)
            assert np.allclose(np.linalg.norm(es.vectors, axis=0), 1.0, atol=1e-10)

    def test_hermitian_dispatch_matches_general(self):
        rng = np.random.default_rng(3)
        H = random_complex(rng, 12)
        H = H + H.conj().T
        es = eig_right(H)
        assert np.max(np.abs(es.eigenvalues.imag)) < 1e-12
        resid = H @ es.vectors - es.vectors * es.eigenvalues[None, :]
        assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(H)

    def test_real_ascending_tie_break(self):
        es = eig_right(np.diag([1.0 + 1.0j, 1.0 - 1.0j]))
        assert np.allclose(es.eigenvalues, [1.0 - 1.0j, 1.0 + 1.0j])


class TestMatchStates:
    def _system(self, vectors):
        vectors = np.asarray(vectors, dtype=complex)
        return EigenSystem(
            eigenvalues=np.arange(vectors.shape[1], dtype=complex), vectors=vectors
        )

    def test_identity(self):
        rng = np.random.default_rng(0)
        v, _ = np.linalg.qr(random_complex(rng, 6))
        es = self._system(v)
        assert np.array_equal(match_states(es, es), np.arange(6))

    def test_swap_recovery(self):
        rng = np.random.default_rng(1)
        v, _ = np.linalg.qr(random_complex(rng, 4))
        swapped = v[:, [1, 0, 2, 3]]
        perm = match_states(self._system(v), self._system(swapped))
        assert np.array_equal(perm, [1, 0, 2, 3])

    def test_rotated_pair_prefers_larger_overlap(self):
        # overlaps: |<e1|n1>| = 0.6, |<e1|n2>| = 0.8 and vice versa; the
        # greedy maximizer takes the 0.8 pairings
        prev = self._system(np.eye(2))
        nxt = self._system(np.array([[0.6, -0.8], [0.8, 0.6]]))
        perm = match_states(prev, nxt)
        assert np.array_equal(perm, [1, 0])

    def test_ambiguous_match_warns(self):
        # DFT columns overlap every basis vector with 1/sqrt(5) < 0.5
        n = 5
        prev = self._system(np.eye(n))
        j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        dft = np.exp(2j * np.pi * j * k / n) / np.sqrt(n)
        with pytest.warns(AmbiguousMatchWarning):
            perm = match_states(prev, self._system(dft))
        assert sorted(perm) == list(range(n))

    def test_bijection_random(self):
        import warnings

        rng = np.random.default_rng(11)
        for n in (2, 7, 23):
            a, _ = np.linalg.qr(random_complex(rng, n))
            b, _ = np.linalg.qr(random_complex(rng, n))
            with warnings.catch_warnings():
                # unrelated random bases legitimately overlap poorly
                warnings.simplefilter("ignore", AmbiguousMatchWarning)
                perm = match_states(self._system(a), self._system(b))
            assert sorted(perm) == list(range(n))


class TestPfaffian:
    def test_two_by_two(self):
        a = 2.0 - 3.0j
        assert pfaffian(np.array([[0, a], [-a, 0]])) == pytest.approx(a)

    def test_odd_dimension_is_zero(self):
        rng = np.random.default_rng(2)
        assert pfaffian(random_skew(rng, 5)) == 0.0

    def test_four_by_four_expansion(self):
        # pf = a12 a34 - a13 a24 + a14 a23 = 6 - 10 + 12 = 8
        a = np.zeros((4, 4))
        a[0, 1], a[0, 2], a[0, 3] = 1.0, 2.0, 3.0
        a[1, 2], a[1, 3] = 4.0, 5.0
        a[2, 3] = 6.0
        a = a - a.T
        assert pfaffian(a) == pytest.approx(8.0)

    def test_rejects_non_skew(self):
        with pytest.raises(NotSkewSymmetricError):
            pfaffian(np.eye(4))

    def test_matches_combinatorial_reference(self):
        rng = np.random.default_rng(5)
        for n in (4, 6, 8):
            a = random_skew(rng, n)
            expect = pfaffian_combinatorial(a)
            assert pfaffian(a) == pytest.approx(expect, rel=1e-10)

    def test_square_equals_determinant(self):
        rng = np.random.default_rng(8)
        for n in (2, 6, 10, 14, 20):
            a = random_skew(rng, n)
            pf = pfaffian(a)
            det = np.linalg.det(a)
            assert pf**2 == pytest.approx(det, rel=1e-8)

    def test_permutation_congruence_sign(self):
        rng = np.random.default_rng(9)
        for n in (4, 8, 12):
            a = random_skew(rng, n)
            perm = rng.permutation(n)
            p = np.eye(n)[:, perm]
            transformed = p.T @ a @ p
            assert pfaffian(transformed) == pytest.approx(
                np.linalg.det(p) * pfaffian(a), rel=1e-9
            )

    def test_real_input_supported(self):
        rng = np.random.default_rng(10)
        a = random_skew(rng, 8, real=True)
        assert pfaffian(a) ** 2 == pytest.approx(np.linalg.det(a), rel=1e-9)


class TestFitLinear:
    def test_exact_line(self):
        fit = fit_linear([0.0, 1.0, 2.0], [1.0, 3.0, 5.0])
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.rms_residual == pytest.approx(0.0, abs=1e-14)

    def test_constant_data(self):
        fit = fit_linear([0.0, 1.0], [4.5, 4.5])
        assert fit.slope == pytest.approx(0.0)
        assert fit.intercept == pytest.approx(4.5)

    def test_normal_equations_by_hand(self):
        # x = (0,1,2), y = (0,1,1): slope 1/2, intercept 1/6,
        # residuals (-1/6, 1/3, -1/6) -> rms sqrt(1/18)
        fit = fit_linear([0.0, 1.0, 2.0], [0.0, 1.0, 1.0])
        assert fit.slope == pytest.approx(0.5)
        assert fit.intercept == pytest.approx(1.0 / 6.0)
        assert fit.rms_residual == pytest.approx(np.sqrt(1.0 / 18.0))

    def test_degenerate_abscissa(self):
        with pytest.raises(DegenerateAbscissaError):
            fit_linear([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])

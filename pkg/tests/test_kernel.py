import numpy as np
import pytest

import reflectedwalk as rw
from reflectedwalk.kernel import kernel_eval


class TestFindKernelRoots:
    def test_simple_walk_quadratic_root(self, simple):
        rs = rw.find_kernel_roots(simple, 0.5)
        assert len(rs) == 1
        assert rs.roots[0] == pytest.approx(2.0 - np.sqrt(3.0), abs=1e-12)

    def test_a_equals_s_all_roots_at_origin(self, dists):
        d = dists["a-equals-s"]
        rs = rw.find_kernel_roots(d, 0.6)
        np.testing.assert_allclose(rs.roots, [0.0, 0.0], atol=1e-12)
        assert rs.clusters == ((0, 1),)
        assert rs.max_modulus <= 1e-12

    def test_a_zero_radical_roots(self, dists):
        d = dists["a-zero"]  # kernel z^2 - u
        rs = rw.find_kernel_roots(d, 0.25)
        np.testing.assert_allclose(sorted(rs.roots.real), [-0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(rs.roots.imag, 0.0, atol=1e-12)

    def test_u_zero(self, dists):
        for d in dists.values():
            rs = rw.find_kernel_roots(d, 0.0)
            np.testing.assert_allclose(rs.roots, 0.0, atol=1e-12)

    def test_u_outside_disk_rejected(self, simple):
        with pytest.raises(ValueError):
            rw.find_kernel_roots(simple, 1.0)

    def test_residuals_small(self, dists):
        for d in dists.values():
            for u in (0.1, 0.5, 0.9):
                rs = rw.find_kernel_roots(d, u)
                assert np.all(rs.residuals <= 1e-10)
                direct = np.abs(kernel_eval(d, u, rs.roots))
                np.testing.assert_allclose(rs.residuals, direct, atol=1e-14)

    def test_conjugate_symmetry_for_real_u(self, dists):
        for d in dists.values():
            for u in (0.3, 0.7):
                rs = rw.find_kernel_roots(d, u)
                conj = np.sort_complex(np.conj(rs.roots))
                np.testing.assert_allclose(
                    np.sort_complex(rs.roots), conj, atol=1e-10
                )

    def test_rouche_count_and_strict_interior(self, dists):
        for d in dists.values():
            for u in (0.25, 0.6, 0.95):
                rs = rw.find_kernel_roots(d, u)
                assert len(rs) == d.s
                assert rs.max_modulus < 1.0


class TestProductEval:
    def test_value_at_one_is_geometric_sum(self, dists):
        for d in dists.values():
            for u in (0.2, 0.5, 0.8):
                rs = rw.find_kernel_roots(d, u)
                val = rw.product_eval(d, u, 1.0, rs)
                assert abs(val - 1.0 / (1.0 - u)) <= 1e-12 / (1.0 - u)

    def test_degenerate_transform_is_geometric(self, dists):
        d = dists["a-equals-s"]
        rs = rw.find_kernel_roots(d, 0.4)
        assert rw.product_eval(d, 0.4, 0.7, rs) == pytest.approx(1.0 / 0.6, rel=1e-13)

    def test_matches_series_partial_sum(self, simple):
        u, z, n_cap = 0.5, 0.5, 60
        f = rw.spitzer_series(simple, n_cap, n_cap)
        rs = rw.find_kernel_roots(simple, u)
        partial = f.partial_sum(u, z)
        tail = u ** (n_cap + 1) / (1.0 - u)
        assert abs(rw.product_eval(simple, u, z, rs) - partial) <= tail + 1e-10

    def test_rejects_z_at_root(self, simple):
        rs = rw.find_kernel_roots(simple, 0.5)
        with pytest.raises(ValueError, match="root"):
            rw.product_eval(simple, 0.5, complex(rs.roots[0]), rs)

    def test_vectorized_matches_scalar(self, simple):
        rs = rw.find_kernel_roots(simple, 0.5)
        zs = np.array([0.1, 0.5, 0.9])
        vec = rw.product_eval(simple, 0.5, zs, rs)
        for z, v in zip(zs, vec):
            assert v == pytest.approx(rw.product_eval(simple, 0.5, z, rs))


class TestLogResidueCheck:
    def test_single_root_closed_form(self):
        # A identically 0 with s = 1: single root z_0 = u
        d = rw.make_family("deterministic", 1, c=0)
        lhs, rhs = rw.root_logresidue_check(d, 0.25, 0.5, 0.35, nodes=512)
        assert lhs == pytest.approx(np.log((0.5 - 0.25) / 0.75), abs=1e-12)
        assert rhs == pytest.approx(lhs, abs=1e-10)

    def test_roots_at_origin_closed_form(self, dists):
        d = dists["a-equals-s"]
        lhs, rhs = rw.root_logresidue_check(d, 0.5, 0.5, 0.25, nodes=512)
        assert lhs == pytest.approx(d.s * np.log(0.5), abs=1e-12)
        assert rhs == pytest.approx(lhs, abs=1e-10)

    def test_simple_walk_agreement(self, simple):
        lhs, rhs = rw.root_logresidue_check(simple, 0.5, 0.6, 0.4, nodes=512)
        z0 = 2.0 - np.sqrt(3.0)
        assert lhs == pytest.approx(np.log((0.6 - z0) / (1.0 - z0)), abs=1e-12)
        assert abs(lhs - rhs) <= 1e-10

    def test_radius_ordering_enforced(self, simple):
        with pytest.raises(ValueError, match="<"):
            rw.root_logresidue_check(simple, 0.5, 0.6, 0.7, nodes=512)
        with pytest.raises(ValueError):
            rw.root_logresidue_check(simple, 0.5, 0.6, 0.1, nodes=512)


class TestNewtonPolish:
    def test_polish_never_increases_residual(self, dists):
        from reflectedwalk.kernel import _polish

        rng = np.random.default_rng(42)
        for d in dists.values():
            for _ in range(10):
                u = rng.uniform(0.05, 0.9)
                z = rng.uniform(-0.9, 0.9) + 1j * rng.uniform(-0.5, 0.5)
                before = abs(kernel_eval(d, u, z))
                _, after = _polish(d, u, z)
                assert after <= before

import numpy as np
import pytest

from fluxchain.errors import UsageError, ValidationError
from fluxchain.lattice import (
    Basis,
    ChainSpec,
    build_matrices,
    extract_tight_binding,
    fit_cosine_dispersion,
    from_diff_com,
    solve_eigenmodes,
    to_diff_com,
    to_diff_only,
)
from oracles import bogoliubov_frequencies

GHZ = 2 * np.pi * 1e9


class TestBuildMatrices:
    def test_decoupled_limit_diagonal_capacitance(self):
        # C_c -> 0: C is diagonal with C_g, L^-1 block diagonal
        spec = ChainSpec(num_cells=2, l_r=2e-9, c_g=100e-15, c_c=1e-30)
        mats = build_matrices(spec)
        off = mats.c_mat - np.diag(np.diag(mats.c_mat))
        assert np.abs(off).max() <= 1e-30
        assert np.allclose(np.diag(mats.c_mat), 100e-15 + 1e-30)
        assert mats.linv_mat[1, 2] == 0.0

    def test_table_values_pattern(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        assert mats.c_mat.shape == (52, 52)
        assert np.allclose(np.diag(mats.c_mat), 451.85e-15)
        assert mats.c_mat[1, 2] == pytest.approx(-202.70e-15)
        assert mats.c_mat[0, 1] == 0.0  # no intra-cell capacitive coupling
        assert mats.linv_mat[0, 1] == pytest.approx(-1 / 2.80e-9)

    def test_symmetry_exact(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        assert np.array_equal(mats.c_mat, mats.c_mat.T)
        assert np.array_equal(mats.linv_mat, mats.linv_mat.T)

    def test_rejects_nonpositive_parameters(self):
        with pytest.raises(ValidationError):
            ChainSpec(num_cells=3, l_r=-1e-9, c_g=1e-13, c_c=1e-13)
        with pytest.raises(ValidationError):
            ChainSpec(num_cells=3, l_r=1e-9, c_g=0.0, c_c=1e-13)


class TestDiffComTransform:
    def test_decoupled_blocks_for_zero_cc(self):
        spec = ChainSpec(num_cells=4, l_r=2e-9, c_g=100e-15, c_c=1e-30)
        pm = to_diff_com(build_matrices(spec))
        m = 4
        assert np.abs(pm.c_mat[:m, m:]).max() < 1e-28
        assert np.abs(pm.c_mat - np.diag(np.diag(pm.c_mat))).max() < 1e-28

    def test_alpha_beta_values(self, device_chain_spec):
        pm = to_diff_com(build_matrices(device_chain_spec))
        m = 26
        # C_alpha = C_sigma/2, C_beta = C_c/4
        assert np.allclose(np.diag(pm.c_mat), 225.925e-15)
        assert abs(pm.c_mat[0, 1]) == pytest.approx(50.675e-15)
        assert abs(pm.c_mat[0, m + 1]) == pytest.approx(50.675e-15)
        # differential coordinates carry 1/L, COM none
        assert np.allclose(np.diag(pm.linv_mat)[:m], 1 / 2.80e-9)
        assert np.allclose(np.diag(pm.linv_mat)[m:], 0.0)

    def test_round_trip(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        back = from_diff_com(to_diff_com(mats))
        assert np.allclose(back.c_mat, mats.c_mat, rtol=1e-12)
        assert np.allclose(back.linv_mat, mats.linv_mat, rtol=1e-12)

    def test_wrong_basis_rejected(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        pm = to_diff_com(mats)
        with pytest.raises(UsageError):
            to_diff_com(pm)
        with pytest.raises(UsageError):
            from_diff_com(mats)


class TestEigenmodes:
    def test_com_zero_modes_and_band(self, device_chain_spec):
        pm = to_diff_com(build_matrices(device_chain_spec))
        modes = solve_eigenmodes(pm)
        assert modes.num_zero_modes == 26
        assert modes.frequencies.size == 26
        fc, j = fit_cosine_dispersion(modes.frequencies_ghz())
        assert fc == pytest.approx(6.9, rel=0.05)
        assert j * 1e3 == pytest.approx(814.4, rel=0.10)

    def test_single_cell_lc_frequency(self):
        spec = ChainSpec(num_cells=1, l_r=3e-9, c_g=200e-15, c_c=100e-15)
        modes = solve_eigenmodes(to_diff_com(build_matrices(spec)))
        expected = np.sqrt(2.0 / (3e-9 * 300e-15))
        assert modes.frequencies[0] == pytest.approx(expected, rel=1e-12)

    def test_node_and_diff_com_spectra_agree(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        f_node = solve_eigenmodes(mats).frequencies
        f_pm = solve_eigenmodes(to_diff_com(mats)).frequencies
        assert np.allclose(f_node, f_pm, rtol=1e-10)

    def test_diff_only_reports_renormalized_band(self, device_chain_spec):
        mats = build_matrices(device_chain_spec)
        f_exact = solve_eigenmodes(to_diff_com(mats)).frequencies
        f_trunc = solve_eigenmodes(to_diff_only(mats)).frequencies
        assert f_trunc.size == 26
        # observable hopping renormalization: interior modes shift by percent
        rel = np.abs(f_trunc / f_exact - 1)
        assert rel.max() > 1e-3
        assert rel.max() < 0.2

    def test_participation_orthonormal_in_c_metric(self, device_chain_spec):
        pm = to_diff_com(build_matrices(device_chain_spec))
        modes = solve_eigenmodes(pm)
        gram = modes.mode_vectors.T @ pm.c_mat @ modes.mode_vectors
        assert np.allclose(gram, np.eye(26), atol=1e-10)

    def test_band_edges_monotone_with_chain_length(self):
        prev_lo, prev_hi = None, None
        base = dict(l_r=2.80e-9, c_g=249.15e-15, c_c=202.70e-15)
        for m in (6, 12, 24):
            modes = solve_eigenmodes(to_diff_com(build_matrices(
                ChainSpec(num_cells=m, **base))))
            lo, hi = modes.frequencies[0], modes.frequencies[-1]
            if prev_lo is not None:
                assert lo < prev_lo
                assert hi > prev_hi
            prev_lo, prev_hi = lo, hi


class TestTightBinding:
    def test_zero_coupling_limit(self):
        spec = ChainSpec(num_cells=5, l_r=2e-9, c_g=100e-15, c_c=1e-25)
        tb = extract_tight_binding(to_diff_com(build_matrices(spec)))
        assert np.abs(tb.hopping).max() < 1e-10 * tb.omega[0]

    def test_bulk_hopping_near_measured_tunneling(self, device_chain_spec):
        tb = extract_tight_binding(to_diff_com(build_matrices(device_chain_spec)))
        t_ghz = tb.bulk_hopping() / GHZ
        assert t_ghz == pytest.approx(0.8144, rel=0.05)

    def test_bulk_sites_uniform(self, device_chain_spec):
        tb = extract_tight_binding(to_diff_com(build_matrices(device_chain_spec)))
        mid = slice(9, 17)
        om = tb.omega[mid]
        assert (om.max() - om.min()) / om.mean() < 1e-9
        th = np.abs(tb.hopping[mid])
        assert (th.max() - th.min()) / th.mean() < 1e-9
        # edge entries differ
        assert abs(tb.omega[0] - tb.bulk_omega()) > 1e-4 * tb.bulk_omega()

    def test_quadratic_model_reproduces_exact_frequencies(self, device_chain_spec):
        pm = to_diff_com(build_matrices(device_chain_spec))
        tb = extract_tight_binding(pm)
        freqs_exact = solve_eigenmodes(pm).frequencies
        freqs_quad = bogoliubov_frequencies(tb.omega, tb.coupling)
        assert np.allclose(freqs_quad, freqs_exact, rtol=1e-6)

    def test_quadratic_model_with_edge_loading(self):
        spec = ChainSpec(num_cells=10, l_r=2.80e-9, c_g=249.15e-15,
                         c_c=202.70e-15, l_r_edge=0.1e-9, edge_loading=4.0e-9)
        pm = to_diff_com(build_matrices(spec))
        tb = extract_tight_binding(pm)
        freqs_exact = solve_eigenmodes(pm).frequencies
        freqs_quad = bogoliubov_frequencies(tb.omega, tb.coupling)
        assert np.allclose(freqs_quad, freqs_exact, rtol=1e-6)
        # loaded edge cell sits below the bulk frequency
        assert tb.omega[0] < tb.bulk_omega()


class TestProperties:
    def test_spectrum_invariant_under_basis_random_specs(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            spec = ChainSpec(num_cells=int(rng.integers(2, 9)),
                             l_r=float(rng.uniform(0.5, 5) * 1e-9),
                             c_g=float(rng.uniform(50, 400) * 1e-15),
                             c_c=float(rng.uniform(10, 400) * 1e-15))
            mats = build_matrices(spec)
            f1 = solve_eigenmodes(mats).frequencies
            f2 = solve_eigenmodes(to_diff_com(mats)).frequencies
            assert f1.size == spec.num_cells
            assert np.allclose(f1, f2, rtol=1e-10)

    def test_finite_chain_inside_infinite_band(self, device_chain_spec):
        # uniform-bulk frequencies must interlace the cosine band edges
        modes = solve_eigenmodes(to_diff_com(build_matrices(device_chain_spec)))
        f = modes.frequencies_ghz()
        fc, j = fit_cosine_dispersion(f)
        assert f[0] > fc - 2 * j - 0.15
        assert f[-1] < fc + 2 * j + 0.15

import math
import warnings

import numpy as np
import pytest
import scipy.integrate

from nlkg.spectral import (BoundarySupportWarning, NormSpec,
                           RepresentationError, SpectralGrid,
                           UnsupportedNormError, VectorField, apply_J,
                           bessel_multiplier, bracket, forward_transform,
                           free_evolve, inverse_transform, norm,
                           pad_spectrum, truncate_spectrum, fft_forward,
                           fft_inverse)


def gaussian_field(grid, width=1.0):
    return VectorField.from_profiles(grid, [lambda x: np.exp(-x ** 2 / (2 * width ** 2))])


class TestGrid:
    def test_frequency_layout(self):
        g = SpectralGrid(30.0, 512)
        assert g.dx * g.n_points == pytest.approx(2 * g.half_width, abs=0)
        d = np.diff(g.xi_sorted)
        assert np.allclose(d, math.pi / g.half_width)
        # symmetric integer range: min is -max - dxi (even grid, no +Nyquist)
        assert abs(g.xi_sorted[0] + g.xi_sorted[-1]) <= g.dxi * (1 + 1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            SpectralGrid(30.0, 500)  # not a power of two
        with pytest.raises(ValueError):
            SpectralGrid(30.0, 512, padding_factor=1)
        with pytest.raises(ValueError):
            SpectralGrid(-1.0, 512)


class TestTransform:
    def test_zero_maps_to_zero(self, small_grid):
        z = VectorField.zero(small_grid, 2)
        assert np.all(forward_transform(z).components == 0)

    def test_gaussian_closed_form(self):
        # the (2 pi)^(-1/2) convention fixes exp(-x^2/2) as its own transform
        g = SpectralGrid(20.0, 512)
        fh = forward_transform(gaussian_field(g))
        target = np.exp(-g.xi_sorted ** 2 / 2)
        got = g.sorted_view(fh.components[0])
        assert np.max(np.abs(got - target)) < 1e-10

    def test_round_trip_random(self, small_grid, rng):
        f = VectorField(small_grid,
                        rng.standard_normal((3, 512)) + 1j * rng.standard_normal((3, 512)))
        back = inverse_transform(forward_transform(f))
        scale = np.max(np.abs(f.components))
        assert np.max(np.abs(back.components - f.components)) <= 1e-12 * scale

    def test_representation_mismatch(self, small_grid):
        f = gaussian_field(small_grid)
        with pytest.raises(RepresentationError):
            forward_transform(forward_transform(f))
        with pytest.raises(RepresentationError):
            inverse_transform(f)

    def test_parseval(self, small_grid, rng):
        f = VectorField(small_grid, rng.standard_normal((1, 512)).astype(complex))
        spec = forward_transform(f)
        phys_l2 = math.sqrt(small_grid.dx * np.sum(np.abs(f.components) ** 2))
        spec_l2 = math.sqrt(small_grid.dxi * np.sum(np.abs(spec.components) ** 2))
        assert phys_l2 == pytest.approx(spec_l2, rel=1e-13)


class TestMultipliers:
    def test_identity_order_zero(self, small_grid, rng):
        f = VectorField(small_grid, rng.standard_normal((1, 512)).astype(complex))
        assert np.array_equal(bessel_multiplier(f, 0.0).components, f.components)

    def test_constant_field_order_two(self, small_grid):
        one = VectorField(small_grid, np.ones((1, 512), dtype=complex))
        out = bessel_multiplier(one, 2.0)
        assert np.max(np.abs(out.components - 1.0)) < 1e-12

    def test_group_law(self, small_grid, rng):
        f = VectorField(small_grid, rng.standard_normal((1, 512)).astype(complex))
        a = bessel_multiplier(bessel_multiplier(f, 1.3), 0.7)
        b = bessel_multiplier(f, 2.0)
        assert np.max(np.abs(a.components - b.components)) < 1e-12 * np.max(np.abs(b.components))

    def test_inverse_pair(self, small_grid, rng):
        f = VectorField(small_grid, rng.standard_normal((1, 512)).astype(complex))
        back = bessel_multiplier(bessel_multiplier(f, 1.0), -1.0)
        assert np.max(np.abs(back.components - f.components)) < 1e-12


class TestFreeEvolve:
    def test_time_zero_identity(self, small_grid):
        f = gaussian_field(small_grid)
        assert np.array_equal(free_evolve(f, 0.0).components, f.components)

    def test_unimodular_spectrum(self, small_grid):
        f = gaussian_field(small_grid)
        a = np.abs(forward_transform(f).components)
        b = np.abs(forward_transform(free_evolve(f, 17.3)).components)
        assert np.max(np.abs(a - b)) < 1e-13

    @pytest.mark.parametrize("s", [0, 1, 2, 3, 4])
    def test_isometry_all_orders(self, medium_grid, rng, s):
        f = VectorField(medium_grid,
                        (rng.standard_normal((2, 1024)) + 1j * rng.standard_normal((2, 1024))))
        before = norm(f, NormSpec(s, 0, 2))
        after = norm(free_evolve(f, 23.7), NormSpec(s, 0, 2))
        assert abs(after - before) <= 1e-12 * before

    def test_dispersive_sup_decay(self):
        # (1+t)^(1/2) * sup stays bounded along the free flow
        g = SpectralGrid(400.0, 8192)
        f = VectorField.from_profiles(g, [lambda x: 0.1 * np.exp(-x ** 2 / 4)])
        vals = []
        for t in np.linspace(10.0, 100.0, 10):
            vals.append(math.sqrt(t) * norm(free_evolve(f, t), NormSpec(0, 0, math.inf)))
        assert max(vals) < 2.0 * min(vals)


class TestNorms:
    def test_zero(self, small_grid):
        assert norm(VectorField.zero(small_grid, 2)) == 0.0

    def test_gaussian_l2_closed_form(self, small_grid):
        f = VectorField.from_profiles(small_grid, [lambda x: np.exp(-x ** 2)])
        assert norm(f) == pytest.approx((math.pi / 2) ** 0.25, abs=1e-12)

    def test_weighted_l2_against_quadrature(self, small_grid):
        f = VectorField.from_profiles(small_grid, [lambda x: np.exp(-x ** 2)])
        oracle = math.sqrt(scipy.integrate.quad(
            lambda x: (1 + x * x) * math.exp(-2 * x * x), -np.inf, np.inf)[0])
        assert norm(f, NormSpec(0, 1, 2)) == pytest.approx(oracle, abs=1e-8)

    def test_sup_norm_with_smoothing(self, small_grid):
        f = gaussian_field(small_grid)
        val = norm(f, NormSpec(1, 0, math.inf))
        assert val > norm(f, NormSpec(0, 0, math.inf)) > 0

    def test_unsupported(self):
        with pytest.raises(UnsupportedNormError):
            NormSpec(0, 0, 4)
        with pytest.raises(UnsupportedNormError):
            NormSpec(1, 1, math.inf)


class TestJ:
    def test_zero_field(self, small_grid):
        z = VectorField.zero(small_grid, 1)
        assert np.all(apply_J(z, 3.0).components == 0)

    def test_parity_at_time_zero(self, medium_grid):
        f = gaussian_field(medium_grid)
        out = apply_J(f, 0.0).components[0]
        flipped = out[1:][::-1]  # grid is [-L, L), drop the unpaired left edge
        assert np.max(np.abs(out[1:] + flipped)) < 1e-10  # odd output

    def test_commutes_with_free_flow(self, medium_grid):
        f = VectorField.from_profiles(
            medium_grid, [lambda x: np.exp(-x ** 2 / 4) * (1 + 0.3 * x)])
        t = 5.0
        lhs = apply_J(free_evolve(f, t), t)
        rhs = free_evolve(apply_J(f, 0.0), t)
        diff = norm(VectorField(medium_grid, lhs.components - rhs.components))
        assert diff <= 1e-8 * norm(f, NormSpec(1, 1, 2))

    def test_boundary_warning(self, small_grid):
        wide = VectorField.from_profiles(small_grid, [lambda x: np.exp(-x ** 2 / 500)])
        with pytest.warns(BoundarySupportWarning):
            apply_J(wide, 1.0)

    def test_localised_field_no_warning(self, small_grid):
        f = gaussian_field(small_grid)
        with warnings.catch_warnings():
            warnings.simplefilter("error", BoundarySupportWarning)
            apply_J(f, 1.0)


class TestDealiasing:
    def test_cubic_products_alias_free(self, rng):
        # cube a field whose triple products overflow the base band, compare
        # with an oracle on a four times finer band
        g = SpectralGrid(40.0, 256)
        spec = np.zeros((1, 256), dtype=complex)
        for k in range(1, 61):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            spec[0, k] = c
            spec[0, -k] = np.conj(c)
        fine = g.fine
        f_fine = fft_inverse(fine, pad_spectrum(g, spec)).real
        cube = truncate_spectrum(g, fft_forward(fine, (f_fine ** 3).astype(complex)))

        g4 = SpectralGrid(40.0, 1024)
        spec4 = np.zeros((1, 1024), dtype=complex)
        spec4[0, :61] = spec[0, :61]
        spec4[0, -60:] = spec[0, -60:]
        f4 = fft_inverse(g4, spec4).real
        oracle_full = fft_forward(g4, (f4 ** 3).astype(complex))
        oracle = np.concatenate([oracle_full[0, :128], oracle_full[0, -128:]])
        scale = np.max(np.abs(oracle))
        assert np.max(np.abs(cube[0] - oracle)) <= 1e-12 * scale

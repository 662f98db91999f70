from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlkg.exactalg import ExactComplex, positive_combination
from nlkg.nonlinearity import (CubicTensor, HermitianForm,
                               NotHermitianError, NotPositiveDefiniteError,
                               UnsupportedDimensionError, builtin_tensor,
                               eval_F, eval_F_exact, eval_Ftilde,
                               eval_Ftilde_exact, eval_G, expand_condition,
                               hermitian_from_config, structure_search,
                               structure_verify, tensor_from_config)
from nlkg.spectral import SpectralGrid, VectorField

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=9)


class TestTensors:
    def test_builtin_values(self):
        t = builtin_tensor("rho_family(1,1,1,1)")
        assert np.allclose(eval_F(t, np.array([1.0, 1.0])), [2.0, 2.0])
        ft = eval_Ftilde(t, np.array([1.0 + 0j, 0.0]))
        assert np.allclose(ft, [3.0, 0.0])

    def test_scalar_cube(self):
        s = builtin_tensor("scalar_cubic")
        assert eval_F(s, np.array([2.0]))[0] == 8.0
        assert eval_Ftilde(s, np.array([1j]))[0] == pytest.approx(3j)

    def test_zero_tensor(self):
        z = CubicTensor.from_entries(2, {})
        assert z.is_zero()
        assert np.all(eval_F(z, np.array([1.0, 2.0])) == 0)

    def test_counterexample_layout(self):
        ce = builtin_tensor("counterexample")
        out = eval_F(ce, np.array([2.0, 5.0]))
        assert out[0] == 0.0 and out[1] == 8.0

    def test_config_round_trip(self):
        t = builtin_tensor("rho_family(1,1/2,3,-2)")
        back = tensor_from_config(t.to_config())
        assert back == t

    def test_dimension_mismatch(self):
        s = builtin_tensor("scalar_cubic")
        with pytest.raises(ValueError):
            eval_F(s, np.array([1.0, 2.0]))

    @given(lam=rationals, u1=rationals, u2=rationals)
    @settings(max_examples=40, deadline=None)
    def test_exact_homogeneity(self, lam, u1, u2):
        t = builtin_tensor("rho_family(1,2,3,4)")
        scaled = eval_F_exact(t, [lam * u1, lam * u2])
        direct = [lam ** 3 * v for v in eval_F_exact(t, [u1, u2])]
        assert scaled == direct

    @given(u1=rationals, u2=rationals)
    @settings(max_examples=40, deadline=None)
    def test_real_slice_identity(self, u1, u2):
        t = builtin_tensor("rho_family(2,-1,5,1/3)")
        ft = eval_Ftilde_exact(t, [ExactComplex(u1), ExactComplex(u2)])
        f3 = [ExactComplex(3 * v) for v in eval_F_exact(t, [u1, u2])]
        assert all((a - b).is_zero() for a, b in zip(ft, f3))


class TestEvalG:
    def test_zero(self, small_grid):
        t = builtin_tensor("complex_cubic")
        z = VectorField.zero(small_grid, 2)
        assert np.all(eval_G(t, z).components == 0)

    def test_two_forms_agree(self, small_grid):
        # eval_G cross-checks (i/2)<iD>^-1 F(v + conj v) against
        # 4i <iD>^-1 F(Re v) internally and raises on disagreement
        t = builtin_tensor("complex_cubic")
        x = small_grid.x
        v = VectorField(small_grid, np.array([
            0.1 * np.exp(-x ** 2 / 2) * (1 + 0.5j),
            0.05 * np.exp(-x ** 2 / 3) * (1 - 0.2j)]))
        out = eval_G(t, v, check=True)
        assert np.max(np.abs(out.components)) > 0

    def test_single_mode_consistency(self, small_grid):
        s = builtin_tensor("scalar_cubic")
        k = 2.0 * np.pi * 3 / (2 * small_grid.half_width)
        v = VectorField.from_profiles(small_grid, [lambda x: 0.2 * np.cos(k * x)])
        out = eval_G(s, v, check=True)  # the built-in check is the assertion
        assert out.components.shape == (1, small_grid.n_points)


class TestHermitianForm:
    def test_hermitian_enforced(self):
        with pytest.raises(NotHermitianError):
            HermitianForm.from_rows([[1, ["0", "1"]], [["0", "1"], 1]])

    def test_definiteness(self):
        good = HermitianForm.from_rows([[2, ["1", "1"]], [["1", "-1"], 3]])
        assert good.is_positive_definite()
        bad = HermitianForm.diagonal([1, "-1/2"])
        assert not bad.is_positive_definite()
        with pytest.raises(NotPositiveDefiniteError):
            bad.assert_positive_definite()

    def test_eigen_bounds(self):
        a = HermitianForm.diagonal([1, 4])
        lo, hi = a.eigen_bounds()
        assert lo == pytest.approx(1.0) and hi == pytest.approx(4.0)


class TestStructureCondition:
    def test_empty_polynomial_for_zero_tensor(self):
        poly = expand_condition(CubicTensor.from_entries(2, {}),
                                HermitianForm.identity(2))
        assert not poly.terms

    def test_scalar_condition_holds(self):
        s = builtin_tensor("scalar_cubic")
        poly = expand_condition(s, HermitianForm.diagonal(["7/3"]))
        assert not poly.conjugate_asymmetries()
        verdict = structure_verify(s, HermitianForm.diagonal(["7/3"]))
        assert verdict.holds

    def test_example_family_with_recipe_matrix(self):
        # r2 r3 > 0 together with diag(|r3|, |r2|) satisfies the criterion
        for rho in ("rho_family(1,2,3,4)", "rho_family(-1,-2,-3,4)",
                    "rho_family(0,1/2,1/3,-5)"):
            t = builtin_tensor(rho)
            e = t.entry_map
            a = HermitianForm.diagonal([abs(e[(1, 0, 0, 1)]), abs(e[(0, 1, 1, 0)])])
            assert structure_verify(t, a).holds

    def test_complex_cubic_with_identity(self):
        assert structure_verify(builtin_tensor("complex_cubic"),
                                HermitianForm.identity(2)).holds

    def test_counterexample_violated(self):
        ce = builtin_tensor("counterexample")
        verdict = structure_verify(ce, HermitianForm.identity(2))
        assert not verdict.holds
        y, value = verdict.witness
        assert value > 1e-6
        # the violating monomial pairs Y2 conj(Y1) |Y1|^2 against nothing
        assert verdict.violations

    def test_violated_when_r2r3_negative(self):
        t = builtin_tensor("rho_family(1,-2,3,4)")
        a = HermitianForm.diagonal([3, 2])
        assert not structure_verify(t, a).holds

    def test_rejects_non_definite(self):
        s = builtin_tensor("scalar_cubic")
        with pytest.raises(NotPositiveDefiniteError):
            structure_verify(s, HermitianForm.diagonal([0]))

    def test_soundness_sampling(self, rng):
        t = builtin_tensor("rho_family(1,2,3,4)")
        a = HermitianForm.diagonal([3, 2])
        assert structure_verify(t, a).holds
        worst = 0.0
        af = a.array
        for _ in range(10_000):
            y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            val = abs(np.imag(np.dot(af @ y, np.conj(eval_Ftilde(t, y)))))
            worst = max(worst, val / (1 + np.linalg.norm(y) ** 4))
        assert worst <= 1e-10

    def test_convention_independence(self):
        # swapping which argument carries the conjugate leaves the truth
        # value alone because the matrix is Hermitian
        cases = [
            (builtin_tensor("rho_family(1,2,3,4)"), HermitianForm.diagonal([3, 2])),
            (builtin_tensor("counterexample"), HermitianForm.identity(2)),
            (builtin_tensor("scalar_cubic"), HermitianForm.identity(1)),
        ]
        rng = np.random.default_rng(7)
        for tensor, a in cases:
            decided = not expand_condition(tensor, a).conjugate_asymmetries()
            af = a.array
            worst = 0.0
            for _ in range(400):
                y = rng.standard_normal(a.n) + 1j * rng.standard_normal(a.n)
                swapped = abs(np.imag(np.dot(np.conj(af @ y), eval_Ftilde(tensor, y))))
                worst = max(worst, swapped)
            assert decided == (worst < 1e-9)


class TestStructureSearch:
    def test_example_family(self):
        res = structure_search(builtin_tensor("rho_family(1,2,3,4)"))
        assert res.found
        arr = res.matrix.array
        assert arr[0, 0].real / arr[1, 1].real == pytest.approx(1.5)
        assert structure_verify(builtin_tensor("rho_family(1,2,3,4)"), res.matrix).holds

    def test_counterexample_obstruction(self):
        res = structure_search(builtin_tensor("counterexample"))
        assert res.status == "none_found"
        assert "A[2,2] = 0" in res.obstruction

    def test_zero_tensor_identity(self):
        res = structure_search(CubicTensor.from_entries(2, {}))
        assert res.found
        assert np.allclose(res.matrix.array, np.eye(2))

    def test_scalar(self):
        res = structure_search(builtin_tensor("scalar_cubic"))
        assert res.found

    def test_search_result_reverifies(self):
        for name in ("complex_cubic", "rho_family(2,1,1,2)", "rho_family(1,1/2,1/3,1)"):
            t = builtin_tensor(name)
            res = structure_search(t)
            assert res.found
            assert structure_verify(t, res.matrix).holds

    def test_dimension_cap(self):
        big = CubicTensor.from_entries(5, {(0, 0, 0, 0): 1})
        with pytest.raises(UnsupportedDimensionError):
            structure_search(big)


class TestExactHelpers:
    def test_positive_combination_found(self):
        basis = [[Fraction(3), Fraction(2)]]
        point = positive_combination(basis)
        assert point is not None and all(p >= 1 for p in point)

    def test_positive_combination_impossible(self):
        basis = [[Fraction(1), Fraction(-1)]]
        assert positive_combination(basis) is None

    def test_hermitian_config_round_trip(self):
        a = HermitianForm.from_rows([[2, ["1/2", "1/3"]], [["1/2", "-1/3"], 1]])
        back = hermitian_from_config(a.to_config())
        assert back == a

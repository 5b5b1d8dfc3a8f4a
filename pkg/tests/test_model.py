import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemotaxis_lab import (
    FieldState,
    Grid1D,
    negative_part,
    positive_part,
    signed_parts,
    validate_params,
)
from helpers import mk_params

finite_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestSignedParts:
    def test_negative_number(self):
        assert positive_part(-3.0) == 0.0
        assert negative_part(-3.0) == 3.0

    def test_positive_number(self):
        assert positive_part(2.5) == 2.5
        assert negative_part(2.5) == 0.0

    def test_zero(self):
        assert positive_part(0.0) == 0.0
        assert negative_part(0.0) == 0.0

    def test_dataclass_fields(self):
        sp = signed_parts(-1.25)
        assert sp.pos == 0.0
        assert sp.neg == 1.25

    @settings(max_examples=200, deadline=None)
    @given(finite_floats)
    def test_algebra(self, a):
        sp = signed_parts(a)
        assert sp.pos >= 0.0
        assert sp.neg >= 0.0
        assert sp.pos - sp.neg == a
        assert sp.pos + sp.neg == abs(a)
        assert sp.pos * sp.neg == 0.0


class TestValidateParams:
    def test_base_valid_with_positive_chi(self):
        assert validate_params(mk_params(chi1=0.1, chi2=0.1)) == []

    def test_zero_chi_reported(self):
        problems = validate_params(mk_params())
        assert any("chi1" in msg for msg in problems)
        assert any("chi2" in msg for msg in problems)

    @pytest.mark.parametrize("name", ["d1", "d2", "d3", "a0", "b0", "a1", "b2", "k", "l", "lam", "omega_measure"])
    def test_nonpositive_rejected(self, name):
        problems = validate_params(mk_params(chi1=0.1, chi2=0.1, **{name: 0.0}))
        assert any(name in msg and "positive" in msg for msg in problems)

    def test_signed_fields_allowed_negative(self):
        p = mk_params(chi1=0.1, chi2=0.1, a2=-1.0, a3=-2.0, a4=-3.0, b1=-1.0, b3=-2.0, b4=-3.0)
        assert validate_params(p) == []

    def test_non_finite_reported(self):
        problems = validate_params(mk_params(chi1=0.1, chi2=0.1, a3=math.inf))
        assert any("a3" in msg and "finite" in msg for msg in problems)

    def test_nan_reported(self):
        problems = validate_params(mk_params(chi1=0.1, chi2=0.1, b4=math.nan))
        assert any("b4" in msg for msg in problems)


class TestGrid1D:
    def test_dx(self):
        assert Grid1D(length=2.0, n_cells=8).dx == 0.25

    def test_cell_centers(self):
        g = Grid1D(length=1.0, n_cells=4)
        assert np.allclose(g.cell_centers(), [0.125, 0.375, 0.625, 0.875])

    def test_integrate_constant_exact(self):
        g = Grid1D(length=3.0, n_cells=16)
        assert g.integrate(np.full(16, 2.0)) == pytest.approx(6.0, rel=1e-15)

    def test_too_few_cells(self):
        with pytest.raises(ValueError, match="n_cells"):
            Grid1D(length=1.0, n_cells=3)

    def test_non_integer_cells(self):
        with pytest.raises(ValueError, match="integer"):
            Grid1D(length=1.0, n_cells=8.0)

    def test_bool_cells_rejected(self):
        with pytest.raises(ValueError, match="integer"):
            Grid1D(length=1.0, n_cells=True)

    def test_nonpositive_length(self):
        with pytest.raises(ValueError, match="length"):
            Grid1D(length=0.0, n_cells=8)
        with pytest.raises(ValueError, match="length"):
            Grid1D(length=-1.0, n_cells=8)


class TestFieldState:
    def test_coerces_to_float_arrays(self):
        s = FieldState(t=0.0, u=[1, 2, 3], v=[0, 0, 0], w=[1, 1, 1])
        assert s.u.dtype == np.float64
        assert s.n_cells == 3

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="share one grid"):
            FieldState(t=0.0, u=[1, 2, 3], v=[0, 0], w=[1, 1, 1])

    def test_rejects_2d(self):
        with pytest.raises(ValueError, match="1-D"):
            FieldState(t=0.0, u=np.zeros((2, 2)), v=np.zeros(4), w=np.zeros(4))

    def test_check_nonnegative(self):
        s = FieldState(t=0.0, u=[0.0, 1.0], v=[0.5, 0.5], w=[0.0, 0.0])
        assert s.check_nonnegative()
        dusty = FieldState(t=0.0, u=[-1e-12, 1.0], v=[0.5, 0.5], w=[0.0, 0.0])
        assert not dusty.check_nonnegative()
        assert dusty.check_nonnegative(tol=1e-10)

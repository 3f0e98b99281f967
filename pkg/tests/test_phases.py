import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_op, tfim_ground_oracle
from isingcausal.errors import ValidationError
from isingcausal.lattice import TfimSpec
from isingcausal.phases import (
    QUARTER,
    locate_qpt,
    mz_thermo,
    order_parameters,
    ostr_finite,
    ostr_thermo,
    refine_peak,
)

HALF_PI = math.pi / 2


class TestThermo:
    def test_endpoints(self):
        assert mz_thermo(0.0) == 1.0
        assert ostr_thermo(HALF_PI) == 1.0
        assert mz_thermo(QUARTER) == 0.0 and ostr_thermo(QUARTER) == 0.0

    @settings(max_examples=60)
    @given(st.floats(0, HALF_PI))
    def test_disjoint_support(self, theta):
        assert mz_thermo(theta) * ostr_thermo(theta) == 0.0
        assert 0.0 <= mz_thermo(theta) <= 1.0 and 0.0 <= ostr_thermo(theta) <= 1.0

    @settings(max_examples=40)
    @given(st.floats(0, HALF_PI))
    def test_duality(self, theta):
        # the string of one phase is the squared magnetization of the dual angle
        assert ostr_thermo(HALF_PI - theta) == pytest.approx(mz_thermo(theta) ** 2, abs=1e-12)

    def test_known_value(self):
        assert ostr_thermo(3 * math.pi / 8) == pytest.approx(0.9540333962, abs=1e-9)

    @pytest.mark.parametrize("theta", [-0.1, HALF_PI + 0.01, math.nan])
    def test_range(self, theta):
        with pytest.raises(ValidationError):
            mz_thermo(theta)

    def test_monotone(self):
        grid = np.linspace(0, QUARTER, 20)
        assert np.all(np.diff([mz_thermo(t) for t in grid]) <= 0)


class TestFiniteString:
    @pytest.mark.parametrize("m", [4, 6])
    def test_matches_dense(self, m):
        _, psi = tfim_ground_oracle(m, 1.1)
        ref = psi @ kron_op(m, {i: "X" for i in range(m // 2)}) @ psi
        assert ostr_finite(TfimSpec(m, 1.1)) == pytest.approx(ref, abs=1e-10)

    def test_converges(self):
        theta = 3 * math.pi / 8
        assert ostr_finite(TfimSpec(200, theta)) == pytest.approx(ostr_thermo(theta), abs=1e-6)

    def test_disordered_side_small(self):
        assert abs(ostr_finite(TfimSpec(100, 0.3))) < 1e-6

    def test_explicit_length(self):
        assert ostr_finite(TfimSpec(8, HALF_PI), 3) == pytest.approx(1.0)


class TestOrderParameters:
    def test_fields(self):
        op = order_parameters(20, 0.4)
        assert op.m_z_thermo > 0 and op.o_str_thermo == 0.0
        assert op.n_sites == 20

    def test_rejects_odd(self):
        with pytest.raises(ValidationError):
            order_parameters(7, 0.3)

    def test_duality_of_finite_values(self):
        a = order_parameters(40, 0.3)
        b = order_parameters(40, HALF_PI - 0.3)
        assert a.m_x == pytest.approx(b.c_zz, abs=1e-10)


class TestRefinePeak:
    def test_exact_parabola(self):
        t = np.linspace(0, 1, 11)
        v = 1 - (t - 0.437) ** 2
        arg, refined, peak = refine_peak(t, v)
        assert arg == pytest.approx(0.4)
        assert refined == pytest.approx(0.437) and peak == pytest.approx(1.0)

    def test_edge_maximum(self):
        t = np.linspace(0, 1, 5)
        assert refine_peak(t, t) == (1.0, 1.0, 1.0)

    @pytest.mark.parametrize("t,v", [
        ([0, 1], [0, 1]),
        ([0, 1, 2], [0, math.nan, 0]),
        ([0, 2, 1], [0, 1, 0]),
    ])
    def test_invalid(self, t, v):
        with pytest.raises(ValidationError):
            refine_peak(t, v)


class TestLocateQpt:
    def test_from_dicts(self):
        grid = np.linspace(0, HALF_PI, 17)
        recs = [{"theta": t, "k_avg": (2 + math.sin(t) + math.cos(t)) / 4,
                 "m_z_thermo": mz_thermo(t), "o_str_thermo": ostr_thermo(t)} for t in grid]
        q = locate_qpt(recs)
        assert q.theta_argmax == pytest.approx(QUARTER)
        assert q.theta_refined == pytest.approx(QUARTER, abs=1e-3)
        assert q.theta_crossing == pytest.approx(QUARTER)
        assert q.grid_spacing == pytest.approx(HALF_PI / 16)

    def test_without_thermo(self):
        recs = [{"theta": t, "k_avg": -((t - 0.5) ** 2)} for t in (0.0, 0.4, 0.6, 1.0)]
        assert locate_qpt(recs).theta_crossing is None

    def test_too_few(self):
        with pytest.raises(ValidationError):
            locate_qpt([{"theta": 0.0, "k_avg": 1.0}])

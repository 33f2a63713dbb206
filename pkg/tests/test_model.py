"""Domain types, conic conversions, and the bundled dataset."""
import math

import pytest

from pvtransfer import (
    ConicElements,
    OrbitalState,
    PhysicalConstants,
    Vehicle,
    elements_to_state,
    load_paper_dataset,
    state_to_elements,
)
from pvtransfer.model import raw_dataset_json


@pytest.fixture(scope="module")
def ds():
    return load_paper_dataset()


class TestValidation:
    def test_constants_reject_nonpositive(self):
        with pytest.raises(ValueError):
            PhysicalConstants(gamma=-1.0, g0=9.8)
        with pytest.raises(ValueError):
            PhysicalConstants(gamma=3.986e14, g0=0.0)

    def test_vehicle_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Vehicle(p_max=0.0, isp=356.0, m0=28000.0)

    def test_state_rejects_bad_radius_and_vtheta(self):
        with pytest.raises(ValueError):
            OrbitalState(t=0, r=-1.0, v_r=0, v_theta=1, theta=0, chi=0, dv=0)
        with pytest.raises(ValueError):
            OrbitalState(t=0, r=1.0, v_r=0, v_theta=0.0, theta=0, chi=0, dv=0)

    def test_elements_reject_bad_values(self):
        with pytest.raises(ValueError):
            ConicElements(l=0.0, e=0.1, f=0.0)
        with pytest.raises(ValueError):
            ConicElements(l=1e6, e=-0.1, f=0.0)


class TestConicConversions:
    def test_circular_orbit(self):
        # [TRIVIAL] e = 0: r = l, v_r = 0, v_theta = sqrt(gamma / l).
        k = PhysicalConstants(gamma=3.98600436233e14, g0=9.80665)
        l = 7000e3
        r, v_r, v_th = elements_to_state(ConicElements(l=l, e=0.0, f=1.0), k)
        assert r == pytest.approx(l)
        assert v_r == pytest.approx(0.0, abs=1e-12)
        assert v_th == pytest.approx(math.sqrt(k.gamma / l))

    def test_roundtrip_is_identity(self, ds):
        # [TRIVIAL] state -> elements -> state at machine precision.
        k = ds.constants
        el0 = ds.initial.elements
        r, v_r, v_th = elements_to_state(el0, k)
        el1 = state_to_elements(r, v_r, v_th, k)
        assert el1.l == pytest.approx(el0.l, rel=1e-14)
        assert el1.e == pytest.approx(el0.e, rel=1e-12)
        assert el1.f == pytest.approx(el0.f, rel=1e-12)

    def test_dataset_initial_orbit_consistency(self, ds):
        # [REFERENCE: dataset initial orbit] elements and state agree to
        # the dataset's own rounding (worst component ~5e-4 relative).
        r, v_r, v_th = elements_to_state(ds.initial.elements, ds.constants)
        assert r == pytest.approx(ds.initial.r, rel=1e-3)
        assert v_r == pytest.approx(ds.initial.v_r, rel=1e-3)
        assert v_th == pytest.approx(ds.initial.v_theta, rel=1e-3)

    def test_hyperbolic_asymptote_rejected(self):
        # [TRIVIAL] 1 + e cos f <= 0 has no conic point.
        k = PhysicalConstants(gamma=3.98600436233e14, g0=9.80665)
        with pytest.raises(ValueError):
            elements_to_state(ConicElements(l=1e7, e=2.0, f=math.pi), k)

    def test_state_to_elements_rejects_bad_input(self, ds):
        with pytest.raises(ValueError):
            state_to_elements(-1.0, 0.0, 1000.0, ds.constants)
        with pytest.raises(ValueError):
            state_to_elements(7e6, 0.0, -1.0, ds.constants)


class TestDataset:
    def test_tables_cover_all_inclinations(self, ds):
        assert ds.inclinations_deg == (0, 10, 20, 60, 90)
        for table in (ds.table5, ds.table6, ds.table7, ds.table8):
            assert set(table) == {0, 10, 20, 60, 90}

    def test_reference_values(self, ds):
        # [REFERENCE: dataset table6 row 0]
        row = ds.table6[0]
        assert row.dv_total == pytest.approx(3795.94)
        assert row.t_f_s == pytest.approx(2242.29)
        # [REFERENCE: dataset table8 row 0 is flagged unreliable]
        assert ds.table8[0].suspect
        assert not ds.table8[10].suspect

    def test_units_are_si(self, ds):
        # [REFERENCE: dataset boundary orbits, km converted to m]
        assert ds.initial.r == pytest.approx(6553.71e3)
        assert ds.final.r == pytest.approx(11595.0e3)
        assert ds.constants.gamma == pytest.approx(3.98600436233e14)

    def test_raw_dump_matches_loaded(self, ds):
        raw = raw_dataset_json()
        assert raw["initial"]["r_km"] == pytest.approx(ds.initial.r / 1e3)
        assert len(raw["table6"]) == 5

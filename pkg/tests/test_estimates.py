import math

import pytest
from hypothesis import given, settings, strategies as st

from rackpinion.estimates import (DeviceSpec, clock_frequency, estimate_report,
                                  friction_coefficient, from_drive_point, inertia_time,
                                  load_presets, moment_of_inertia, preset, skipping_velocity,
                                  to_drive_point)
from rackpinion.model import DrivePoint
from rackpinion.units import LENGTH, VELOCITY, UnitError, parse_quantity

BASE = preset("paper-H100")

positive = st.floats(0.1, 10.0)


class TestFriction:
    def test_reference_value(self):
        # 2*pi * 1e-3 * 1e-5 * (5e-7)**3 / 1e-7
        assert friction_coefficient(BASE) == pytest.approx(7.853981633974483e-20, rel=1e-12)

    def test_film_and_axle_scaling(self):
        assert friction_coefficient(BASE.__class__(**{**BASE.as_dict(), "h": 2e-7})) == \
            pytest.approx(friction_coefficient(BASE) / 2, rel=1e-12)
        assert friction_coefficient(BASE.__class__(**{**BASE.as_dict(), "r": 1e-6})) == \
            pytest.approx(friction_coefficient(BASE) * 8, rel=1e-12)


class TestInertia:
    def test_tau(self):
        tau = inertia_time(BASE)
        assert tau == pytest.approx(2.34e-7, rel=1e-3)
        assert abs(tau / 2.3e-7 - 1) < 0.02

    def test_identity(self):
        assert inertia_time(BASE) * friction_coefficient(BASE) == pytest.approx(
            moment_of_inertia(BASE), rel=1e-12)

    def test_radius_scaling(self):
        big = DeviceSpec(**{**BASE.as_dict(), "R": 2e-6})
        assert inertia_time(big) == pytest.approx(16 * inertia_time(BASE), rel=1e-12)


class TestSkipping:
    def test_weak_grip(self):
        v = skipping_velocity(0.3e-12, BASE)
        assert v == pytest.approx(3.8197186342054885e-06, rel=1e-12)
        assert abs(v / 3.8e-6 - 1) < 0.02

    def test_strong_grip(self):
        v = skipping_velocity(12e-12, BASE)
        assert v == pytest.approx(1.5278874536821953e-04, rel=1e-12)
        assert abs(v / 150e-6 - 1) < 0.03

    def test_zero(self):
        assert skipping_velocity(0.0, BASE) == 0.0

    def test_negative(self):
        with pytest.raises(ValueError):
            skipping_velocity(-1.0, BASE)


class TestClock:
    def test_reference(self):
        v_r = skipping_velocity(12e-12, BASE) / 5
        f = clock_frequency(v_r, 500e-9)
        assert f == pytest.approx(61.11549814728781, rel=1e-12)
        assert abs(f / 60 - 1) < 0.03

    def test_unit_check(self):
        assert clock_frequency(500e-9, 500e-9) == 1.0
        assert clock_frequency(2.0, 1.0) == 2 * clock_frequency(1.0, 1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            clock_frequency(0.0, 1.0)


class TestDrivePoint:
    def test_symmetric_device(self):
        p = to_drive_point(BASE)
        assert p.phi1 == p.phi2 and p.nu == 1.0

    def test_fifth_of_skipping_speed_gives_grip_five(self):
        spec = BASE.with_velocities(skipping_velocity(BASE.F1, BASE) / 5)
        assert to_drive_point(spec).phi1 == pytest.approx(5.0, rel=1e-12)

    def test_threshold_maps_to_one(self):
        zeta = friction_coefficient(BASE)
        spec = DeviceSpec(**{**BASE.as_dict(), "F1": zeta * BASE.V1 / BASE.R ** 2})
        assert to_drive_point(spec).phi1 == pytest.approx(1.0, rel=1e-12)

    def test_skipping_velocity_is_unit_grip(self):
        # locking threshold phi = 1 mapped back to a rack speed is V_S
        zeta = friction_coefficient(BASE)
        v_s = skipping_velocity(BASE.F1, BASE)
        F1, _, _ = from_drive_point(DrivePoint(1.0, 0.0, 1.0), zeta, v_s, BASE.R)
        assert F1 == pytest.approx(BASE.F1, rel=1e-12)

    @given(st.floats(0, 1e-9), st.floats(0, 1e-9), st.floats(1e-7, 1e-3), st.floats(1e-7, 1e-3))
    def test_roundtrip(self, F1, F2, V1, V2):
        spec = DeviceSpec(**{**BASE.as_dict(), "F1": F1, "F2": F2, "V1": V1, "V2": V2})
        back = from_drive_point(to_drive_point(spec), friction_coefficient(spec), V1, spec.R)
        assert back == pytest.approx((F1, F2, V2), rel=1e-12, abs=1e-300)


@settings(max_examples=50)
@given(positive, positive, positive)
def test_scaling_exponents(kr, kh, kR):
    d = BASE.as_dict()
    scaled = DeviceSpec(**{**d, "r": d["r"] * kr, "h": d["h"] * kh, "R": d["R"] * kR})
    assert friction_coefficient(scaled) == pytest.approx(
        friction_coefficient(BASE) * kr ** 3 / kh, rel=1e-12)
    assert inertia_time(scaled) == pytest.approx(
        inertia_time(BASE) * kR ** 4 * kh / kr ** 3, rel=1e-12)
    assert skipping_velocity(1e-12, scaled) == pytest.approx(
        skipping_velocity(1e-12, BASE) * kR ** 2 * kh / kr ** 3, rel=1e-12)


class TestDeviceSpec:
    def test_rejects_touching_corrugations(self):
        with pytest.raises(ValueError):
            DeviceSpec(**{**BASE.as_dict(), "a": 100e-9})

    @pytest.mark.parametrize("key", ["R", "eta", "V1"])
    def test_rejects_nonpositive(self, key):
        with pytest.raises(ValueError):
            DeviceSpec(**{**BASE.as_dict(), key: 0.0})

    def test_from_mapping_strict(self):
        data = dict(load_presets()["paper-H100"])
        with pytest.raises(KeyError, match="colour"):
            DeviceSpec.from_mapping({**data, "colour": "red"})
        del data["eta"]
        with pytest.raises(KeyError, match="eta"):
            DeviceSpec.from_mapping(data)

    def test_optional_metadata(self):
        data = {k: v for k, v in load_presets()["paper-H100"].items() if k not in ("H", "a")}
        assert DeviceSpec.from_mapping(data).H is None


class TestPresets:
    def test_names(self):
        assert {"paper", "paper-H100", "paper-H200"} <= set(load_presets())

    def test_alias(self):
        assert preset("paper") == preset("paper-H100")

    def test_weak_device(self):
        p = preset("paper-H200")
        assert p.F1 == pytest.approx(0.3e-12) and p.H == pytest.approx(200e-9)
        assert skipping_velocity(p.F1, p) == pytest.approx(3.82e-6, rel=1e-3)

    def test_unknown(self):
        with pytest.raises(KeyError):
            preset("nope")

    def test_report(self):
        r = estimate_report(preset("paper"))
        assert r["zeta"] == pytest.approx(7.853981633974483e-20, rel=1e-12)
        assert r["V_R"] == pytest.approx(r["V_S1"] / 5, rel=1e-15)
        assert r["clock_frequency"] == pytest.approx(61.1155, rel=1e-5)


class TestUnits:
    @pytest.mark.parametrize("text,expected", [
        ("500 nm", 5e-7), ("1 um", 1e-6), ("1 µm", 1e-6), ("2.5e-3 m", 2.5e-3), (3.0, 3.0),
        ("7", 7.0),
    ])
    def test_length(self, text, expected):
        assert parse_quantity(text, LENGTH) == pytest.approx(expected, rel=1e-15)

    def test_velocity(self):
        assert parse_quantity("30 um/s", VELOCITY) == pytest.approx(3e-5, rel=1e-15)
        assert parse_quantity("1 mm/ms", VELOCITY) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("text", ["5 furlongs", "nm", True, None, "1 pN"])
    def test_rejects(self, text):
        with pytest.raises(UnitError):
            parse_quantity(text, LENGTH)

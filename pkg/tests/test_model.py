import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mwtunnel import ConfigError, LatticeConfig, UnitSystem, uniform_chain, validate
from mwtunnel.model import MIN_SAFE_SEPARATION


class TestUnitSystem:
    def test_frequency_round_trip(self):
        units = UnitSystem()
        assert units.frequency_to_dimensionless(
            units.frequency_to_physical(0.13)
        ) == pytest.approx(0.13, rel=1e-15)

    def test_time_round_trip(self):
        units = UnitSystem()
        assert units.time_to_dimensionless(units.time_to_physical(7.5)) == (
            pytest.approx(7.5, rel=1e-15)
        )

    def test_length_conversion(self):
        units = UnitSystem(oscillator_length_m=0.065e-9)
        assert units.length_to_physical(5.0) == pytest.approx(0.325e-9)

    def test_dimensionless_frequency_scale(self):
        units = UnitSystem(trap_frequency_hz=40e3)
        assert units.frequency_to_physical(1.0) == pytest.approx(
            2 * math.pi * 40e3
        )

    def test_invalid_anchors_rejected(self):
        with pytest.raises(ConfigError):
            UnitSystem(trap_frequency_hz=0.0)
        with pytest.raises(ConfigError):
            UnitSystem(oscillator_length_m=-1.0)


class TestLatticeConfig:
    def test_uniform_chain_positions(self):
        cfg = uniform_chain(3, 5.0, 0.1, 0.13)
        assert cfg.positions == (0.0, 5.0, 10.0)
        assert cfg.n_sites == 3
        assert cfg.uniform_spacing == 5.0

    def test_non_increasing_positions_rejected(self):
        with pytest.raises(ConfigError, match="increasing"):
            LatticeConfig(positions=(0.0, 5.0, 5.0), detuning=0.0, drive=0.1)

    def test_negative_drive_rejected(self):
        with pytest.raises(ConfigError, match="drive"):
            uniform_chain(2, 5.0, 0.0, -0.1)

    def test_empty_positions_rejected(self):
        with pytest.raises(ConfigError):
            LatticeConfig(positions=(), detuning=0.0, drive=0.1)

    def test_initial_site_out_of_range(self):
        with pytest.raises(ConfigError, match="initial_site"):
            uniform_chain(2, 5.0, 0.0, 0.1, initial_site=3)
        with pytest.raises(ConfigError, match="initial_site"):
            uniform_chain(2, 5.0, 0.0, 0.1, initial_site=0)

    def test_close_spacing_warns(self):
        with pytest.warns(UserWarning, match="separation"):
            uniform_chain(2, 0.5 * MIN_SAFE_SEPARATION, 0.0, 0.1)

    def test_separations_matrix(self):
        cfg = uniform_chain(3, 5.0, 0.0, 0.1)
        expected = np.array(
            [[0.0, 5.0, 10.0], [5.0, 0.0, 5.0], [10.0, 5.0, 0.0]]
        )
        np.testing.assert_allclose(cfg.separations(), expected)

    def test_non_uniform_spacing_is_none(self):
        cfg = LatticeConfig(positions=(0.0, 5.0, 11.0), detuning=0.0, drive=0.1)
        assert cfg.uniform_spacing is None

    def test_initial_amplitudes(self):
        cfg = uniform_chain(3, 5.0, 0.0, 0.1, initial_site=2)
        np.testing.assert_array_equal(
            cfg.initial_amplitudes, np.array([0.0, 1.0, 0.0])
        )

    def test_with_replaces_fields(self):
        cfg = uniform_chain(2, 5.0, 0.0, 0.1)
        assert cfg.with_(detuning=0.2).detuning == 0.2
        assert cfg.with_spacing(7.0).positions == (0.0, 7.0)

    def test_validate_passthrough(self):
        cfg = uniform_chain(2, 5.0, 0.0, 0.1)
        assert validate(cfg) is cfg


class TestJsonSchema:
    def test_round_trip(self):
        cfg = uniform_chain(3, 6.0, -0.05, 0.13, initial_site=2)
        again = LatticeConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_schema_keys(self):
        data = uniform_chain(2, 5.0, 0.06, 0.13).to_dict()
        assert data["n_sites"] == 2
        assert data["positions_zbar"] == [0.0, 5.0]
        assert data["omega0_wtilde"] == 0.06
        assert data["omega_rabi_wtilde"] == 0.13
        assert data["initial_site"] == 1
        assert "trap_frequency_hz" in data["units"]

    def test_missing_key_raises(self):
        with pytest.raises(ConfigError, match="missing"):
            LatticeConfig.from_dict({"positions_zbar": [0.0, 5.0]})

    def test_site_count_mismatch_raises(self):
        data = uniform_chain(2, 5.0, 0.0, 0.1).to_dict()
        data["n_sites"] = 3
        with pytest.raises(ConfigError, match="n_sites"):
            LatticeConfig.from_dict(data)

    def test_json_is_valid(self):
        json.loads(uniform_chain(2, 5.0, 0.0, 0.1).to_json())

    @given(
        n=st.integers(min_value=1, max_value=5),
        spacing=st.floats(min_value=2.0, max_value=30.0),
        detuning=st.floats(min_value=-1.0, max_value=1.0),
        drive=st.floats(min_value=0.0, max_value=0.5),
    )
    def test_round_trip_property(self, n, spacing, detuning, drive):
        cfg = uniform_chain(n, spacing, detuning, drive)
        assert LatticeConfig.from_dict(cfg.to_dict()) == cfg

import json
import math

import pytest

from mmwsec.scenario import (
    AnPattern,
    AntennaPattern,
    BlockageModel,
    FadingParams,
    PathLossModel,
    ScenarioError,
    ScenarioParams,
    db_to_linear,
    linear_to_db,
    load_scenario,
    microwave_preset,
    noise_power,
    preset,
    PRESET_NAMES,
    rate_to_threshold,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)


def _assert_dicts_close(left, right, rel=1e-12):
    assert set(left) == set(right)
    for key, lv in left.items():
        rv = right[key]
        if isinstance(lv, dict):
            _assert_dicts_close(lv, rv, rel)
        elif isinstance(lv, float):
            assert lv == pytest.approx(rv, rel=rel, abs=1e-15), key
        else:
            assert lv == rv, key


def _config(**overrides):
    data = {
        "bs_intensity": 2e-4,
        "eve_intensity": 1e-4,
        "tx_power_db": 30.0,
        "bandwidth_hz": 2e9,
        "noise_figure_db": 10.0,
        "blockage": {"los_fraction": 0.12, "los_radius_m": 200.0},
        "pathloss": {
            "alpha_los": 2.0,
            "alpha_nlos": 2.92,
            "beta_los_db": 61.4,
            "beta_nlos_db": 72.0,
        },
        "fading": {"nakagami_los": 3, "nakagami_nlos": 2},
        "antenna": {
            "kind": "beamforming",
            "main_gain_db": 15.0,
            "side_gain_db": -3.0,
            "beamwidth_deg": 9.0,
        },
        "thresholds": {"t_c_db": 10.0, "t_e_db": 0.0},
        "eavesdropper_mode": "non_colluding",
    }
    data.update(overrides)
    return data


class TestNoisePower:
    def test_wideband(self):
        # -174 + 10 log10(2e9) + 10 = -70.9897 dB
        n0 = noise_power(2e9, 10.0)
        assert 10.0 * math.log10(n0) == pytest.approx(-70.98970004336019, abs=1e-10)

    def test_unit_bandwidth(self):
        assert 10.0 * math.log10(noise_power(1.0, 0.0)) == pytest.approx(-174.0, abs=1e-12)

    def test_hand_evaluation(self):
        # -174 + 74.4716 + 7 = -92.5284 dB
        expected_db = -174.0 + 10.0 * math.log10(28e6) + 7.0
        assert expected_db == pytest.approx(-92.52841968657781, abs=1e-10)
        assert 10.0 * math.log10(noise_power(28e6, 7.0)) == pytest.approx(expected_db, abs=1e-10)

    def test_invalid_bandwidth(self):
        with pytest.raises(ScenarioError):
            noise_power(0.0, 3.0)


class TestConversions:
    def test_db_involution(self):
        for db in (-174.0, -3.0, 0.0, 15.0, 30.0, 61.4):
            assert linear_to_db(db_to_linear(db)) == pytest.approx(db, rel=1e-12, abs=1e-12)

    def test_rate_to_threshold(self):
        assert rate_to_threshold(1.0) == pytest.approx(1.0, rel=1e-12)
        assert rate_to_threshold(3.0) == pytest.approx(7.0, rel=1e-12)


class TestValidation:
    def test_blockage_fraction_range(self):
        with pytest.raises(ScenarioError):
            BlockageModel(los_fraction=1.3, los_radius_m=200.0)

    def test_pathloss_ordering(self):
        with pytest.raises(ScenarioError):
            PathLossModel(alpha_los=3.0, alpha_nlos=2.0, beta_los_db=61.4, beta_nlos_db=72.0)
        with pytest.raises(ScenarioError):
            PathLossModel(alpha_los=2.0, alpha_nlos=2.92, beta_los_db=72.0, beta_nlos_db=61.4)

    def test_fading_integers(self):
        with pytest.raises(ScenarioError):
            FadingParams(nakagami_los=0, nakagami_nlos=2)
        with pytest.raises(ScenarioError):
            FadingParams(nakagami_los=2.5, nakagami_nlos=2)  # type: ignore[arg-type]

    def test_antenna_gains(self):
        with pytest.raises(ScenarioError):
            AntennaPattern(main_gain=1.0, side_gain=2.0, beamwidth_deg=9.0)
        with pytest.raises(ScenarioError):
            AntennaPattern(main_gain=2.0, side_gain=1.0, beamwidth_deg=200.0)

    def test_an_power_split(self):
        with pytest.raises(ScenarioError):
            AnPattern(info_gain=10.0, an_gain=2.0, beamwidth_deg=9.0, power_split=1.2)

    def test_sector_probabilities_sum(self):
        antenna = AntennaPattern(main_gain=10.0, side_gain=0.5, beamwidth_deg=9.0)
        assert antenna.main_lobe_prob + antenna.side_lobe_prob == pytest.approx(1.0)
        an = AnPattern(info_gain=10.0, an_gain=2.0, beamwidth_deg=30.0, power_split=0.4)
        assert an.info_sector_prob + an.an_sector_prob == pytest.approx(1.0)


class TestConfigIngestion:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(_config()))
        params = load_scenario(path)
        again = scenario_from_dict(scenario_to_dict(params))
        _assert_dicts_close(scenario_to_dict(params), scenario_to_dict(again))

    def test_save_load_roundtrip(self, tmp_path):
        params = preset("fig5")
        path = tmp_path / "fig5.json"
        save_scenario(params, path)
        _assert_dicts_close(scenario_to_dict(load_scenario(path)), scenario_to_dict(params))

    def test_db_fields_convert_once(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(_config()))
        params = load_scenario(path)
        assert params.tx_power == pytest.approx(1000.0, rel=1e-12)
        assert params.plain.main_gain == pytest.approx(db_to_linear(15.0), rel=1e-12)
        assert params.t_c == pytest.approx(10.0, rel=1e-12)

    def test_rate_thresholds(self, tmp_path):
        cfg = _config(thresholds={"rate_c_bits": 3.0, "rate_e_bits": 1.0})
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(cfg))
        params = load_scenario(path)
        assert params.t_c == pytest.approx(7.0, rel=1e-12)
        assert params.t_e == pytest.approx(1.0, rel=1e-12)

    def test_both_threshold_forms_rejected(self):
        cfg = _config(thresholds={"t_c_db": 10.0, "rate_c_bits": 2.0, "t_e_db": 0.0})
        with pytest.raises(ScenarioError, match="exactly one"):
            scenario_from_dict(cfg)

    def test_invariant_breach(self):
        cfg = _config(blockage={"los_fraction": 1.3, "los_radius_m": 200.0})
        with pytest.raises(ScenarioError, match="los_fraction"):
            scenario_from_dict(cfg)

    def test_unknown_key(self):
        cfg = _config(extra_field=1.0)
        with pytest.raises(ScenarioError, match="extra_field"):
            scenario_from_dict(cfg)

    def test_unknown_nested_key(self):
        cfg = _config(blockage={"los_fraction": 0.1, "los_radius_m": 200.0, "radius": 1.0})
        with pytest.raises(ScenarioError, match="radius"):
            scenario_from_dict(cfg)

    def test_missing_field(self):
        cfg = _config()
        del cfg["pathloss"]
        with pytest.raises(ScenarioError, match="pathloss"):
            scenario_from_dict(cfg)

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "bs_intensity": oops\n}')
        with pytest.raises(ScenarioError, match="line 2"):
            load_scenario(path)

    def test_an_antenna_form(self):
        cfg = _config(
            antenna={
                "kind": "an",
                "info_gain_db": 15.0,
                "an_gain_db": 3.0,
                "beamwidth_deg": 9.0,
                "power_split": 0.5,
            }
        )
        params = scenario_from_dict(cfg)
        assert isinstance(params.antenna, AnPattern)
        assert params.an.power_split == 0.5


class TestPresets:
    def test_all_presets_validate(self):
        for name in PRESET_NAMES:
            params = preset(name)
            assert isinstance(params, ScenarioParams)
            # round-trip through the config form preserves every field
            again = scenario_from_dict(scenario_to_dict(params))
            _assert_dicts_close(scenario_to_dict(again), scenario_to_dict(params))

    def test_fig2_caption_values(self):
        params = preset("fig2")
        assert params.tx_power == pytest.approx(1000.0)
        assert params.plain.beamwidth_deg == 9.0
        assert params.plain.main_gain == pytest.approx(db_to_linear(15.0))
        assert params.plain.side_gain == pytest.approx(db_to_linear(-3.0))
        assert params.blockage.los_fraction == 0.12
        assert params.blockage.los_radius_m == 200.0
        assert params.pathloss.beta_los_db == 61.4
        assert params.pathloss.alpha_los == 2.0
        assert params.eavesdropper_mode == "colluding"

    def test_fig3_chicago_blockage(self):
        params = preset("fig3")
        assert params.blockage.los_fraction == 0.081
        assert params.blockage.los_radius_m == 250.0

    def test_fig5_caption_values(self):
        params = preset("fig5")
        assert params.an.power_split == 0.5
        assert params.an.an_gain == pytest.approx(db_to_linear(3.0))
        assert params.bs_intensity == 5e-5

    def test_fig9_and_microwave(self):
        params = preset("fig9")
        assert params.t_e == pytest.approx(db_to_linear(-30.0))
        mw = microwave_preset()
        assert mw.pathloss_exponent == 2.7
        assert mw.n_antennas == 6
        assert mw.bs_intensity == 8e-4
        assert mw.info_gain == pytest.approx(5.0)

    def test_unknown_preset(self):
        with pytest.raises(ScenarioError, match="unknown preset"):
            preset("fig99")


class TestNoiseNeverStored:
    def test_noise_tracks_bandwidth(self):
        params = preset("fig1")
        denser = params.replace(bandwidth_hz=1e9)
        assert denser.noise == pytest.approx(params.noise / 2.0, rel=1e-12)

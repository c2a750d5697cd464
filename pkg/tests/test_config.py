"""TOML parsing, override precedence, config hashing."""

import pytest

from helecell import (
    GrowthLaw,
    ParseError,
    PowerLaw,
    SingularLaw,
    ValidationError,
    config_dict,
    config_hash,
    parse_config,
)


class TestDefaults:
    def test_no_file_no_overrides(self):
        cfg = parse_config()
        assert isinstance(cfg.law, SingularLaw)
        assert cfg.law.epsilon == 0.5
        assert cfg.growth == GrowthLaw(10.0, 10.0)
        assert cfg.grid.num_cells == 1600
        assert cfg.grid.h == pytest.approx(1.0 / 200.0)
        assert cfg.scheme == "semi_implicit"
        assert cfg.seed == 42

    def test_empty_file_equals_defaults(self, tmp_path):
        f = tmp_path / "empty.toml"
        f.write_text("")
        assert config_hash(parse_config(f)) == config_hash(parse_config())


class TestFileParsing:
    def test_sections(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text(
            "[law]\ntype = \"power\"\ngamma = 8.0\n"
            "[grid]\nnum_cells = 400\n"
            "[time]\nt_final = 0.25\nsnapshot_dt = 0.05\n"
            "[scheme]\nname = \"explicit\"\ncfl_safety = 0.5\n"
        )
        cfg = parse_config(f)
        assert cfg.law == PowerLaw(8.0)
        assert cfg.grid.num_cells == 400
        assert cfg.t_final == 0.25
        assert cfg.scheme == "explicit"
        assert cfg.cfl_safety == 0.5

    def test_growth_disabled_by_zero_slope(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[growth]\ng_slope = 0.0\n")
        assert parse_config(f).growth is None

    def test_unknown_key_rejected(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[law]\nfrobnicate = 1\n")
        with pytest.raises(ParseError):
            parse_config(f)

    def test_unknown_section_rejected(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[nonsense]\na = 1\n")
        with pytest.raises(ParseError):
            parse_config(f)

    def test_malformed_toml(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[law\n")
        with pytest.raises(ParseError):
            parse_config(f)

    def test_semantic_violation(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[law]\nepsilon = -1.0\n")
        with pytest.raises(ValidationError):
            parse_config(f)


class TestOverrides:
    def test_override_beats_file(self, tmp_path):
        f = tmp_path / "c.toml"
        f.write_text("[law]\nepsilon = 0.25\n")
        cfg = parse_config(f, {"epsilon": 0.1})
        assert cfg.law.epsilon == 0.1

    def test_unknown_override_rejected(self):
        with pytest.raises(ParseError):
            parse_config(None, {"frobnicate": 1})

    def test_law_switch(self):
        cfg = parse_config(None, {"law": "power", "gamma": 5.0})
        assert cfg.law == PowerLaw(5.0)

    def test_wrong_types_rejected(self):
        with pytest.raises(ParseError):
            parse_config(None, {"num_cells": "800"})
        with pytest.raises(ParseError):
            parse_config(None, {"t_final": True})


class TestHash:
    def test_stable(self):
        assert config_hash(parse_config()) == config_hash(parse_config())
        assert len(config_hash(parse_config())) == 12

    def test_sensitive_to_changes(self):
        base = config_hash(parse_config())
        assert config_hash(parse_config(None, {"epsilon": 0.1})) != base
        assert config_hash(parse_config(None, {"num_cells": 800})) != base

    def test_dict_round_trip_keys(self):
        d = config_dict(parse_config())
        assert d["law.type"] == "singular"
        assert d["law.epsilon"] == 0.5
        assert d["grid.num_cells"] == 1600
        assert d["run.seed"] == 42

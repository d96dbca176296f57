import math

import pytest

from app.models.request import Command
from app.utils.alias_mapper import UnitAliasMapper
from app.utils.validators import ConfigError, ConfigValidator, config_hash, parse_config


class TestParseConfig:
    def test_defaults(self):
        config = parse_config("", command="figure1")
        assert config.command == Command.FIGURE1
        assert config.figure1.k_z == 1.0
        assert config.figure1.C == 0.1
        assert config.figure1.two_pinholes.entrance_radius == 1.0e-3

    def test_document_command_and_comments(self):
        text = "# 반사 스캔\ncommand = figure2\ntheta_points = 50  # 빠르게\n"
        config = parse_config(text)
        assert config.command == Command.FIGURE2
        assert config.figure2.theta_points == 50

    def test_cli_command_wins(self):
        config = parse_config("command = figure2\n", command="design")
        assert config.command == Command.DESIGN

    def test_missing_command(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("figure2.theta_points = 10")
        assert exc.value.code == "MISSING_KEY"

    def test_unknown_command(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("command = figure9")
        assert exc.value.code == "UNKNOWN_COMMAND"

    def test_voltage_requires_alpha(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("", command="voltage")
        assert exc.value.field == "voltage.alpha"
        assert exc.value.code == "MISSING_KEY"

    def test_alpha_with_degree_suffix(self):
        config = parse_config("alpha = 1deg", command="voltage")
        assert config.voltage.alpha == pytest.approx(math.pi / 180)

    def test_overrides_replace_document(self):
        config = parse_config("design.E = [1e7]\n", command="design", overrides=["design.E = [3e7, 4e7]", "L=2"])
        assert config.design.E == [3e7, 4e7]
        assert config.design.L == [2.0]

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("bogus = 1", command="figure2")
        assert exc.value.code == "UNKNOWN_KEY"
        assert exc.value.field == "figure2.bogus"

    def test_duplicate_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("E = [1e7]\nE = [1e8]\n", command="design")
        assert exc.value.code == "DUPLICATE_KEY"

    def test_duplicate_after_qualification(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("E = [1e7]\ndesign.E = [1e8]\n", command="design")
        assert exc.value.code == "DUPLICATE_KEY"
        assert exc.value.field == "design.E"

    def test_malformed_line(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("E = [1e7]\nthis is not an assignment\n", command="design")
        assert exc.value.code == "MALFORMED_LINE"
        assert exc.value.field == "line 2"

    def test_invalid_value(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("theta_points = many", command="figure2")
        assert exc.value.code == "INVALID_VALUE"
        assert exc.value.field == "figure2.theta_points"

    def test_unclosed_list(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("E = [1e7, 1e8", command="design")
        assert exc.value.code == "MALFORMED_LIST"

    def test_key_conflict(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("figure4.R = 2\nfigure4.R.x = 1\n", command="figure4")
        assert exc.value.code == "KEY_CONFLICT"

    def test_partial_collimator_override(self):
        config = parse_config("figure1.annulus_and_pinhole.exit_radius = 0.2mm", command="figure1")
        geom = config.figure1.annulus_and_pinhole
        assert geom.exit_radius == pytest.approx(2e-4)
        assert geom.annulus_outer == 5.0e-3


class TestSweep:
    def test_design_axis_expands(self):
        config = parse_config("sweep.target = design\nsweep.E = [1e7, 1e8]\n", command="sweep")
        points = ConfigValidator().expand_sweep(config)
        assert [overrides for overrides, _ in points] == [{"design.E": 1e7}, {"design.E": 1e8}]
        assert [p.design.E for _, p in points] == [[1e7], [1e8]]
        assert all(p.command == Command.DESIGN for _, p in points)

    def test_cartesian_product(self):
        text = "sweep.target = figure2\nsweep.E = [1e9, 1e10]\nsweep.figure2.theta_points = [10, 20, 30]\n"
        points = ConfigValidator().expand_sweep(parse_config(text, command="sweep"))
        assert len(points) == 6
        assert {p.figure2.theta_points for _, p in points} == {10, 20, 30}

    def test_requires_target(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("sweep.E = [1e7]", command="sweep")
        assert exc.value.field == "sweep.target"

    def test_requires_axis(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("sweep.target = design", command="sweep")
        assert exc.value.code == "EMPTY_SWEEP"

    def test_sweep_cannot_target_itself(self):
        with pytest.raises(ConfigError):
            parse_config("sweep.target = sweep\nsweep.E = [1]", command="sweep")


class TestConfigHash:
    def test_stable_and_sensitive(self):
        a = parse_config("", command="design")
        b = parse_config("", command="design")
        c = parse_config("rng_seed = 9", command="design")
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)
        assert len(config_hash(a)) == 64

    def test_ignores_output_dir(self):
        a = parse_config("", command="design")
        b = parse_config("output_dir = 'elsewhere'", command="design")
        assert config_hash(a) == config_hash(b)


class TestUnitAliasMapper:
    @pytest.mark.parametrize("text, expected", [
        ("1deg", math.pi / 180),
        ("17.45 mrad", 17.45e-3),
        ("2Å", 2e-10),
        ("0.5mm", 5e-4),
        ("3", 3.0),
    ])
    def test_parse_quantity(self, text, expected):
        assert UnitAliasMapper().parse_quantity(text) == pytest.approx(expected)

    @pytest.mark.parametrize("text", ["3 parsec", "deg", "fast"])
    def test_unrecognized(self, text):
        assert UnitAliasMapper().parse_quantity(text) is None

    def test_aliases(self):
        mapper = UnitAliasMapper()
        assert mapper.validate_alias("°")
        assert not mapper.validate_alias("furlong")
        assert mapper.resolve_alias("nm") == ("length", 1e-9)
        assert "mrad" in mapper.get_supported_aliases()

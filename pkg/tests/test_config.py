from pathlib import Path

import pytest
import yaml

from momentkit.config import DEFAULT_CONFIG, Config
from momentkit.errors import ConfigError


def test_defaults_without_file(tmp_path):
    config = Config(str(tmp_path / "missing.yaml"))
    assert config.precision_bits == 256
    assert config.ell_max == 3
    assert config.output_format == "json"
    assert config.log_level == "INFO"
    settings = config.get_determinacy_settings()
    assert settings['cauchy_fraction'] == 1e-4
    assert settings['tail_exponent_guard'] == -1.25
    assert set(settings) == set(DEFAULT_CONFIG['determinacy'])


def test_yaml_overrides_merge_with_defaults(tmp_path):
    path = tmp_path / "momentkit.yaml"
    path.write_text(yaml.dump({'precision': {'bits': 512}, 'logging': {'level': 'DEBUG'}}))
    config = Config(str(path))
    assert config.precision_bits == 512
    assert config.log_level == "DEBUG"
    assert config.as_dict()['pade'] == DEFAULT_CONFIG['pade']


def test_set_and_save_round_trip(tmp_path):
    path = tmp_path / "momentkit.yaml"
    config = Config(str(path))
    config.set("pade.ell_max", 5)
    config.save()
    assert Config(str(path)).ell_max == 5


@pytest.mark.parametrize("content", [
    {'precision': {'bits': 32}},
    {'output': {'format': 'xml'}},
    {'pade': {'ell_max': 0}},
])
def test_invalid_values_raise(tmp_path, content):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.dump(content))
    with pytest.raises(ConfigError):
        Config(str(path))


def test_top_level_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        Config(str(path))


def _leaf_keys(tree, prefix=""):
    keys = set()
    for key, value in tree.items():
        path = f"{prefix}{key}"
        keys |= _leaf_keys(value, path + ".") if isinstance(value, dict) else {path}
    return keys


def test_example_file_documents_every_default():
    example = Path(__file__).parent.parent / "config.example.yaml"
    assert _leaf_keys(yaml.safe_load(example.read_text(encoding="utf-8"))) == _leaf_keys(DEFAULT_CONFIG)
    assert Config(str(example)).as_dict() == DEFAULT_CONFIG

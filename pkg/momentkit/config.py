"""Configuration management for momentkit."""

import copy
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigError
from .scalars import MIN_PRECISION


class Config:
    """Configuration management with YAML support."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration.

        Args:
            config_path: Path to a YAML file. Defaults to momentkit.yaml in the
                project root; a missing file means built-in defaults.
        """
        if config_path is None:
            self.config_path = Path(__file__).parent.parent / "momentkit.yaml"
        else:
            self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self.load()

    def load(self) -> None:
        """Load configuration from YAML file."""
        if self.config_path.exists():
            with open(self.config_path, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
            if not isinstance(loaded, dict):
                raise ConfigError(f"{self.config_path}: top level must be a mapping")
            self._config = loaded
        else:
            self._config = {}
        self.validate()

    def save(self) -> None:
        """Save configuration to YAML file."""
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.config_path, 'w', encoding='utf-8') as f:
            yaml.dump(self._config, f, default_flow_style=False)

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value using dot notation.

        Args:
            key: Key in dot notation (e.g., "precision.bits")
            default: Default value if key not found. When omitted the value
                from DEFAULT_CONFIG is used.

        Returns:
            Configuration value or default.
        """
        value = _lookup(self._config, key)
        if value is _MISSING:
            value = default if default is not None else _lookup(DEFAULT_CONFIG, key)
        return None if value is _MISSING else value

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value using dot notation.

        Args:
            key: Key in dot notation (e.g., "pade.ell_max")
            value: Value to set
        """
        keys = key.split('.')
        current = self._config
        for k in keys[:-1]:
            if k not in current:
                current[k] = {}
            current = current[k]
        current[keys[-1]] = value
        self.validate()

    def validate(self) -> None:
        """Reject values no computation can run with."""
        bits = self.get('precision.bits')
        if not isinstance(bits, int) or bits < MIN_PRECISION:
            raise ConfigError(f"precision.bits must be an integer >= {MIN_PRECISION}",
                              value=bits)
        fmt = self.get('output.format')
        if fmt not in ('json', 'csv'):
            raise ConfigError("output.format must be json or csv", value=fmt)
        ell_max = self.get('pade.ell_max')
        if not isinstance(ell_max, int) or ell_max < 1:
            raise ConfigError("pade.ell_max must be a positive integer", value=ell_max)

    def as_dict(self) -> Dict[str, Any]:
        merged = copy.deepcopy(DEFAULT_CONFIG)
        _merge(merged, self._config)
        return merged

    # === Precision ===

    @property
    def precision_bits(self) -> int:
        """Default float precision in bits."""
        return self.get('precision.bits')

    # === Padé ===

    @property
    def ell_max(self) -> int:
        """Largest |ell| accepted for off-diagonal Padé shapes."""
        return self.get('pade.ell_max')

    # === Determinacy ===

    def get_determinacy_settings(self) -> Dict[str, Any]:
        """Get thresholds for the determinacy diagnostics.

        Returns:
            Dict with cauchy_fraction, divergence_ratio and tail_exponent_guard.
        """
        return {
            'cauchy_fraction': self.get('determinacy.cauchy_fraction'),
            'divergence_ratio': self.get('determinacy.divergence_ratio'),
            'tail_exponent_guard': self.get('determinacy.tail_exponent_guard'),
        }

    # === Output ===

    @property
    def output_format(self) -> str:
        return self.get('output.format')

    @property
    def log_level(self) -> str:
        """Get log level."""
        return self.get('logging.level')


_MISSING = object()


def _lookup(source: Dict[str, Any], key: str) -> Any:
    value: Any = source
    for k in key.split('.'):
        if isinstance(value, dict) and k in value:
            value = value[k]
        else:
            return _MISSING
    return value


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> None:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


# Default configuration
DEFAULT_CONFIG = {
    'precision': {
        'bits': 256,
    },
    'pade': {
        'ell_max': 3,
    },
    'determinacy': {
        'cauchy_fraction': 1e-4,
        'divergence_ratio': 10,
        'tail_exponent_guard': -1.25,
    },
    'output': {
        'format': 'json',
    },
    'logging': {
        'level': 'INFO',
    },
}

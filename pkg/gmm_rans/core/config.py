"""Configuration management for gmm-rans."""

import os
import json
import yaml
from typing import Optional, Dict, Any, Union, TYPE_CHECKING
from pathlib import Path
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ConfigDict, field_validator, model_validator, ValidationError

from gmm_rans.core.exceptions import ConfigError

if TYPE_CHECKING:
    from gmm_rans.entropy.mixture_cdf import SymbolAlphabet
    from gmm_rans.bench.workload import WorkloadSpec


APPROXIMATOR_NAMES = {"exact", "polya", "as", "logistic"}


class Config(BaseModel):
    """
    Configuration for the codecs and the benchmark harness.

    Defaults approximate one image latent tensor: about a million symbols,
    three mixture components, a 256-symbol alphabet and 16-bit precision.
    """

    model_config = ConfigDict(validate_assignment=True)

    # Coding
    precision_bits: int = Field(default=16, description="Quantizer precision P (m = 2^P)")
    approximator: str = Field(default="logistic", description="Gaussian CDF approximation")
    alphabet_min: int = Field(default=-128, description="Smallest codeable symbol")
    alphabet_max: int = Field(default=127, description="Largest codeable symbol")
    components: int = Field(default=3, description="Mixture components K")

    # Harness
    symbol_count: int = Field(default=1_000_000, description="Symbols per workload")
    repeats: int = Field(default=10, description="Timed repetitions per codec")
    seed: int = Field(default=0, description="Workload seed")
    chunk_size: int = Field(default=0, description="Symbols per independent chunk (0 = one chunk)")
    workers: int = Field(default=1, description="Worker threads for chunked coding")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[str] = Field(default=None, description="Log file path")
    log_format: str = Field(default="text", description="Log format: text or json")

    # Paths
    report_dir: Path = Field(default=Path("./reports"), description="Benchmark report directory")

    _source_file: Optional[str] = None
    _env_prefix: str = "GMM_RANS_"

    @field_validator('precision_bits')
    @classmethod
    def validate_precision_bits(cls, v: int) -> int:
        """Validate precision is within the coder's supported range."""
        if not 8 <= v <= 16:
            raise ValueError("precision_bits must be between 8 and 16")
        return v

    @field_validator('approximator')
    @classmethod
    def validate_approximator(cls, v: str) -> str:
        """Validate the approximator name."""
        if v.lower() not in APPROXIMATOR_NAMES:
            raise ValueError(f"approximator must be one of {sorted(APPROXIMATOR_NAMES)}")
        return v.lower()

    @field_validator('components')
    @classmethod
    def validate_components(cls, v: int) -> int:
        """Validate K is within the data-parallel width."""
        if not 1 <= v <= 4:
            raise ValueError("components must be between 1 and 4")
        return v

    @field_validator('symbol_count', 'chunk_size')
    @classmethod
    def validate_non_negative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator('repeats', 'workers')
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level is valid."""
        valid_levels = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
        if v.upper() not in valid_levels:
            raise ValueError(f"log_level must be one of {valid_levels}")
        return v.upper()

    @field_validator('log_format')
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v.lower() not in {"text", "json"}:
            raise ValueError("log_format must be 'text' or 'json'")
        return v.lower()

    @model_validator(mode='after')
    def validate_alphabet(self) -> "Config":
        """The alphabet must be non-empty and fit the quantizer."""
        size = self.alphabet_max - self.alphabet_min + 1
        if size < 2 or size > 1 << 15:
            raise ValueError("alphabet size must be between 2 and 32768")
        if (1 << self.precision_bits) <= 2 * size:
            raise ValueError("2^precision_bits must exceed twice the alphabet size")
        return self

    @classmethod
    def from_env(cls, env_file: Optional[str] = None, prefix: str = "GMM_RANS_") -> "Config":
        """
        Load configuration from environment variables.

        Each key is looked up with the prefix first, then without it.

        Args:
            env_file: Path to .env file. If None, uses default .env
            prefix: Environment variable prefix

        Returns:
            Config instance

        Raises:
            ConfigError: If configuration validation fails
        """
        if env_file:
            load_dotenv(env_file)
        else:
            load_dotenv()

        def get_env(key: str) -> Optional[str]:
            value: Optional[str] = os.getenv(f"{prefix}{key}")
            if value is not None:
                return value
            return os.getenv(key)

        data: Dict[str, Any] = {}
        for field_name in cls.model_fields:
            value = get_env(field_name.upper())
            if value is not None:
                data[field_name] = value

        try:
            config = cls(**data)
        except ValidationError as e:
            raise ConfigError(f"Configuration validation failed: {e}", original_exception=e) from e

        config._env_prefix = prefix
        if env_file:
            config._source_file = env_file
        return config

    @classmethod
    def from_yaml(cls, yaml_file: Union[str, Path]) -> "Config":
        """
        Load configuration from a YAML file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigError: If configuration validation fails
        """
        yaml_path = Path(yaml_file)
        if not yaml_path.exists():
            raise FileNotFoundError(f"YAML file not found: {yaml_file}")

        try:
            with open(yaml_path, 'r') as f:
                data = yaml.safe_load(f) or {}
            config = cls(**data)
        except ValidationError as e:
            raise ConfigError(f"Configuration validation failed: {e}", original_exception=e) from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Failed to load YAML config: {e}", original_exception=e) from e

        config._source_file = str(yaml_path)
        return config

    @classmethod
    def from_json(cls, json_file: Union[str, Path]) -> "Config":
        """
        Load configuration from a JSON file.

        Raises:
            FileNotFoundError: If the file doesn't exist
            ConfigError: If configuration validation fails
        """
        json_path = Path(json_file)
        if not json_path.exists():
            raise FileNotFoundError(f"JSON file not found: {json_file}")

        try:
            with open(json_path, 'r') as f:
                data = json.load(f)
            config = cls(**data)
        except ValidationError as e:
            raise ConfigError(f"Configuration validation failed: {e}", original_exception=e) from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Failed to load JSON config: {e}", original_exception=e) from e

        config._source_file = str(json_path)
        return config

    def alphabet(self) -> "SymbolAlphabet":
        """Build the configured symbol alphabet."""
        from gmm_rans.entropy.mixture_cdf import SymbolAlphabet

        return SymbolAlphabet(self.alphabet_min, self.alphabet_max, self.precision_bits)

    def workload_spec(self) -> "WorkloadSpec":
        """Build the default workload described by this configuration."""
        from gmm_rans.bench.workload import WorkloadSpec

        return WorkloadSpec(
            symbol_count=self.symbol_count,
            components=self.components,
            y_min=self.alphabet_min,
            y_max=self.alphabet_max,
            precision_bits=self.precision_bits,
            approximator=self.approximator,
            seed=self.seed,
            chunk_size=self.chunk_size,
        )

    def to_dict(self, exclude_none: bool = False) -> Dict[str, Any]:
        """
        Convert config to a JSON-friendly dictionary.

        Args:
            exclude_none: Exclude fields with None values
        """
        data = self.model_dump(exclude_none=exclude_none)
        for key, value in data.items():
            if isinstance(value, Path):
                data[key] = str(value)
        return data

    def to_json(self, file_path: Optional[Union[str, Path]] = None, indent: int = 2) -> str:
        """
        Export configuration to JSON, optionally writing it to ``file_path``.
        """
        json_str = json.dumps(self.to_dict(), indent=indent)
        if file_path:
            output_path = Path(file_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(json_str)
        return json_str

    def to_yaml(self, file_path: Optional[Union[str, Path]] = None) -> str:
        """
        Export configuration to YAML, optionally writing it to ``file_path``.
        """
        yaml_str = yaml.dump(self.to_dict(), default_flow_style=False, sort_keys=False)
        if file_path:
            output_path = Path(file_path)
            output_path.parent.mkdir(parents=True, exist_ok=True)
            output_path.write_text(yaml_str)
        return yaml_str


# Global config instance
_config: Optional[Config] = None


def get_config(env_file: Optional[str] = None, prefix: str = "GMM_RANS_",
               reload: bool = False) -> Config:
    """
    Get or create the global config instance.

    Args:
        env_file: Path to .env file
        prefix: Environment variable prefix
        reload: Force reload of configuration

    Returns:
        Config instance
    """
    global _config
    if _config is None or reload:
        _config = Config.from_env(env_file, prefix)
    return _config


def reset_config() -> None:
    """Reset the global config instance."""
    global _config
    _config = None

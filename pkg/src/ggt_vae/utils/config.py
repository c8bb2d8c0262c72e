"""Configuration management for GGT-VAE experiments."""

import json
from pathlib import Path
from typing import Any, List, Literal, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)
from pydantic.fields import FieldInfo
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from ggt_vae.exceptions import ConfigError
from ggt_vae.utils.logging import LEVELS

RC_FILE_NAME = ".ggt-vaerc.json"
DEFAULT_BETA = 0.5e-3
DEFAULT_SEEDS = list(range(1, 11))


class ModelConfig(BaseModel):
    """Architecture of the graph-transformer encoder."""

    model_config = ConfigDict(extra="forbid")

    layers: int = Field(default=4, ge=0)
    heads: int = Field(default=4, ge=1)
    hidden: int = Field(default=128, ge=1)
    latent: int = Field(default=32, ge=1)
    pe_dim: int = Field(default=16, ge=1)
    ffn_mult: int = Field(default=2, ge=1)
    beta: float = Field(default=DEFAULT_BETA, ge=0)

    @model_validator(mode="after")
    def check_heads_divide_hidden(self) -> "ModelConfig":
        if self.hidden % self.heads:
            raise ValueError(
                f"hidden={self.hidden} is not divisible by heads={self.heads}"
            )
        return self

    @property
    def head_dim(self) -> int:
        return self.hidden // self.heads


class TrainConfig(BaseModel):
    """Optimizer and early-stopping settings."""

    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(default=500, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    weight_decay: float = Field(default=5e-4, ge=0)
    beta: float = Field(default=DEFAULT_BETA, ge=0)
    patience: int = Field(default=50, ge=1)
    seed: int = 0
    eval_every: int = Field(default=1, ge=1)


class SyntheticConfig(BaseModel):
    """Stochastic block model used in place of data files."""

    model_config = ConfigDict(extra="forbid")

    blocks: int = Field(default=2, ge=1)
    block_size: int = Field(default=50, ge=2)
    p_in: float = Field(default=0.3, ge=0, le=1)
    p_out: float = Field(default=0.02, ge=0, le=1)
    feature_dim: int = Field(default=8, ge=1)
    seed: int = 0


class DataConfig(BaseModel):
    """Dataset location and split protocol."""

    model_config = ConfigDict(extra="forbid")

    nodes: Optional[Path] = None
    edges: Optional[Path] = None
    synthetic: Optional[SyntheticConfig] = None
    val_frac: float = Field(default=0.05, ge=0, lt=1)
    test_frac: float = Field(default=0.10, ge=0, lt=1)
    eval_subsample: float = Field(default=1.0, gt=0, le=1)
    pe_solver: Literal["jacobi", "numpy"] = "jacobi"

    @model_validator(mode="after")
    def check_source(self) -> "DataConfig":
        has_files = self.nodes is not None or self.edges is not None
        if has_files and self.synthetic is not None:
            raise ValueError("Give either nodes/edges or synthetic, not both")
        missing = self.nodes is None or self.edges is None
        if self.synthetic is None and missing:
            raise ValueError("Both nodes and edges paths are required")
        if self.val_frac + self.test_frac >= 1:
            raise ValueError("val_frac + test_frac must be below 1")
        return self

    def resolve(self, base_dir: Path) -> "DataConfig":
        """Return a copy with relative paths anchored at ``base_dir``."""
        updates = {}
        for key in ("nodes", "edges"):
            value = getattr(self, key)
            if value is not None and not value.is_absolute():
                updates[key] = (base_dir / value).resolve()
        return self.model_copy(update=updates)


class ExperimentConfig(BaseModel):
    """One experiment: model, training, data, seeds and output location."""

    model_config = ConfigDict(extra="forbid")

    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    data: DataConfig
    seeds: List[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))
    output_dir: Path = Path("runs")
    workers: int = Field(default=1, ge=1)

    @field_validator("seeds")
    @classmethod
    def check_seeds(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("At least one seed is required")
        return v

    @model_validator(mode="after")
    def sync_beta(self) -> "ExperimentConfig":
        model_set = "beta" in self.model.model_fields_set
        train_set = "beta" in self.train.model_fields_set
        if model_set and train_set and self.model.beta != self.train.beta:
            raise ValueError(
                f"model.beta={self.model.beta} and train.beta="
                f"{self.train.beta} disagree"
            )
        if model_set and not train_set:
            self.train.beta = self.model.beta
        elif train_set and not model_set:
            self.model.beta = self.train.beta
        return self

    @property
    def beta(self) -> float:
        return self.train.beta

    def check_files(self) -> None:
        """
        Verify that referenced data files exist.

        Raises:
            ConfigError: A data file is missing
        """
        for path in (self.data.nodes, self.data.edges):
            if path is not None and not path.is_file():
                raise ConfigError(f"Data file not found: {path}")

    def to_json_dict(self) -> dict:
        return json.loads(self.model_dump_json())


def load_experiment_config(
    path: Union[str, Path], check_files: bool = True
) -> ExperimentConfig:
    """
    Load and validate an experiment config.

    Relative data paths and output directories resolve against the
    directory holding the config file.

    Args:
        path: JSON config file
        check_files: Also require the data files to exist

    Returns:
        ExperimentConfig: Validated config

    Raises:
        ConfigError: Unreadable file, unknown keys or invalid values
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: {e.msg}") from e

    try:
        config = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}:\n{e}") from e

    base_dir = path.parent.resolve()
    config.data = config.data.resolve(base_dir)
    if not config.output_dir.is_absolute():
        config.output_dir = (base_dir / config.output_dir).resolve()
    if check_files:
        config.check_files()
    return config


class JsonConfigSettingsSource(PydanticBaseSettingsSource):
    """Custom settings source that loads variables from .ggt-vaerc.json."""

    def __init__(self, settings_cls: type[BaseSettings]):
        super().__init__(settings_cls)
        self.config_file_path: Path = Path.cwd() / RC_FILE_NAME

    def get_field_value(
        self,
        field: FieldInfo,
        field_name: str,
    ) -> tuple[Any, str, bool]:
        """Get field value from JSON config file."""
        if not self.config_file_path.exists():
            return None, field_name, False

        try:
            with open(self.config_file_path, "r", encoding="utf-8") as f:
                config_data = json.load(f)
        except (json.JSONDecodeError, FileNotFoundError):
            return None, field_name, False

        return config_data.get(field_name), field_name, False

    def __call__(self) -> dict[str, Any]:
        """Return configuration dictionary."""
        config_dict: dict[str, Any] = {}

        for field_name, field in self.settings_cls.model_fields.items():
            field_value, field_key, _ = self.get_field_value(
                field,
                field_name,
            )
            if field_value is not None:
                config_dict[field_key] = field_value

        return config_dict


class GgtVaeSettings(BaseSettings):
    """Process-level settings; none of them affect numerical results."""

    log_level: str = Field(default="INFO", description="Logging level")
    use_color: bool = Field(default=True, description="Colored log output")
    pe_cache_dir: Optional[Path] = Field(
        default=None,
        description="Directory for cached positional encodings",
    )
    pe_cache_size: int = Field(
        default=32, ge=1, description="In-memory positional-encoding entries"
    )

    model_config = SettingsConfigDict(
        env_file_encoding="utf-8",
        env_prefix="GGT_VAE_",
        case_sensitive=False,
    )

    @field_validator("log_level", mode="after")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in LEVELS:
            raise ValueError(f"Unknown log level: {v}")
        return v.upper()

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Customize settings sources to include JSON config file."""
        return (
            init_settings,
            env_settings,
            JsonConfigSettingsSource(settings_cls),
            dotenv_settings,
            file_secret_settings,
        )

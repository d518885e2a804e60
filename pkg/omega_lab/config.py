"""
Configuration module for omega-lab.
Uses `pydantic-settings`; values come from keyword arguments or an
optional YAML settings file, never from the environment.
"""

from pathlib import Path
from typing import Literal, Tuple

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from omega_lab.errors import ConfigurationError


class Settings(BaseSettings):
    APP_NAME: str = "omega-lab"
    APP_VERSION: str = "1.0.0"

    MAX_BITS: int = Field(default=64, ge=1)

    DEFAULT_FUEL: int = Field(default=64, ge=1)
    ORACLE_STAGE_CEILING: int = Field(default=24, ge=1)
    BERRY_MULTIPLIER: int = Field(default=100, ge=1)

    STAGE_WORKERS: int = Field(default=1, ge=1)

    LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"

    model_config = SettingsConfigDict(
        case_sensitive=True,
        extra="forbid",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # all configuration is explicit
        return (init_settings,)


def load_settings(path: Path) -> Settings:
    """
    Build settings from a YAML file.

    Args:
        path: Settings file with upper-case keys matching `Settings`

    Returns:
        Validated settings

    Raises:
        ConfigurationError: If the file is not a mapping or holds invalid values
    """
    with open(path, encoding="utf-8") as handle:
        data = yaml.safe_load(handle) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Settings file {path} must contain a mapping")
    try:
        return Settings(**data)
    except ValueError as e:
        raise ConfigurationError(f"Invalid settings in {path}: {e}") from e


settings = Settings()

# 配置管理模块

import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict

import yaml

from src.logging_config import get_logger

logger = get_logger(__name__)

MAX_CARRIER_ENV = "DECKIT_MAX_CARRIER"


@dataclass(frozen=True)
class Limits:
    """Enumeration caps shared by both finite models."""

    max_carrier: int = 16
    max_states: int = 256
    max_candidates: int = 1_000_000


@dataclass(frozen=True)
class SoundnessSettings:
    samples: int = 500
    seed: int = 42
    max_depth: int = 5
    workers: int = 1


class ConfigManager:
    """管理 YAML 配置文件，支持默认值回退和环境变量覆盖。"""

    DEFAULT_CONFIG = {
        "limits": {
            "max_carrier": 16,
            "max_states": 256,
            "max_candidates": 1_000_000,
        },
        "soundness": {
            "samples": 500,
            "seed": 42,
            "max_depth": 5,
            "workers": 1,
        },
        "logging": {"level": "WARNING", "directory": None},
    }

    def __init__(self, config_path: str = "deckit.yaml"):
        self.config_path = Path(config_path)
        self.config = self._load_config()
        self._apply_environment()

    def _load_config(self) -> Dict[str, Any]:
        if not self.config_path.exists():
            logger.debug(f"Configuration file not found: {self.config_path}. Using defaults.")
            return copy.deepcopy(self.DEFAULT_CONFIG)

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                loaded_config = yaml.safe_load(f)

            if loaded_config is None:
                logger.warning(
                    f"Configuration file is empty: {self.config_path}. Using default configuration."
                )
                return copy.deepcopy(self.DEFAULT_CONFIG)
            if not isinstance(loaded_config, dict):
                logger.warning(
                    f"Configuration file {self.config_path} is not a mapping. "
                    "Using default configuration."
                )
                return copy.deepcopy(self.DEFAULT_CONFIG)

            config = self._merge_configs(self.DEFAULT_CONFIG, loaded_config)
            logger.info(f"配置已从 {self.config_path} 成功加载")
            return config

        except yaml.YAMLError as e:
            logger.error(
                f"Error parsing YAML configuration file {self.config_path}: {e}. "
                "Using default configuration."
            )
            return copy.deepcopy(self.DEFAULT_CONFIG)

    def _merge_configs(self, default: Dict[str, Any], loaded: Dict[str, Any]) -> Dict[str, Any]:
        merged = copy.deepcopy(default)

        for key, value in loaded.items():
            if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
                # Recursively merge nested dictionaries
                merged[key] = self._merge_configs(merged[key], value)
            else:
                merged[key] = value

        return merged

    def _apply_environment(self) -> None:
        raw = os.environ.get(MAX_CARRIER_ENV)
        if raw is None:
            return
        try:
            value = int(raw)
        except ValueError:
            logger.warning(f"Ignoring {MAX_CARRIER_ENV}={raw!r}: not an integer")
            return
        if value <= 0:
            logger.warning(f"Ignoring {MAX_CARRIER_ENV}={raw!r}: must be positive")
            return
        self.config["limits"]["max_carrier"] = value
        logger.debug(f"max_carrier overridden from environment: {value}")

    def get_limits(self) -> Limits:
        limits = self.config.get("limits", self.DEFAULT_CONFIG["limits"])
        return Limits(
            max_carrier=int(limits.get("max_carrier", 16)),
            max_states=int(limits.get("max_states", 256)),
            max_candidates=int(limits.get("max_candidates", 1_000_000)),
        )

    def get_soundness_settings(self) -> SoundnessSettings:
        section = self.config.get("soundness", self.DEFAULT_CONFIG["soundness"])
        return SoundnessSettings(
            samples=int(section.get("samples", 500)),
            seed=int(section.get("seed", 42)),
            max_depth=int(section.get("max_depth", 5)),
            workers=max(1, int(section.get("workers", 1))),
        )

    def get_logging_config(self) -> Dict[str, Any]:
        return dict(self.config.get("logging", self.DEFAULT_CONFIG["logging"]))

    def override_config(self, overrides: Dict[str, Any]) -> None:
        for key, value in overrides.items():
            if key in self.config and isinstance(self.config[key], dict) and isinstance(value, dict):
                self.config[key].update(value)
            else:
                self.config[key] = value

        logger.debug(f"配置被覆盖为: {overrides}")

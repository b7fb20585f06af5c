"""Service configuration: one TOML file, validated at load time.

The LLM API key is never read from the file, only from the environment
variable named by ``llm.key_env_var``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .llm import LlmConfig

_LOG_LEVELS = ("debug", "info", "warning", "error")


@dataclass
class ServiceConfig:
    store_path: str = "termbase.db"
    listen_address: str = "127.0.0.1:8077"
    max_results: int = 50
    fuzzy_threshold_ratio: float = 0.25
    log_level: str = "info"
    llm: LlmConfig = field(default_factory=LlmConfig)

    def validate(self) -> None:
        if self.max_results < 1:
            raise ConfigError("max_results must be >= 1")
        if not 0 < self.fuzzy_threshold_ratio <= 1:
            raise ConfigError("fuzzy_threshold_ratio must be in (0, 1]")
        if self.log_level not in _LOG_LEVELS:
            raise ConfigError(
                f"log_level must be one of {_LOG_LEVELS}, got {self.log_level!r}"
            )
        if ":" not in self.listen_address:
            raise ConfigError("listen_address must look like host:port")
        _, port = self.listen_address.rsplit(":", 1)
        if not port.isdigit():
            raise ConfigError(f"listen_address port {port!r} is not a number")

    @property
    def host(self) -> str:
        return self.listen_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_address.rsplit(":", 1)[1])


def load_config(path: str | Path) -> ServiceConfig:
    """Parse and validate; parse errors are fatal with line diagnostics."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        # TOMLDecodeError messages carry "(at line N, column M)".
        raise ConfigError(f"config file {path}: {exc}") from None

    known = {"store_path", "listen_address", "max_results",
             "fuzzy_threshold_ratio", "log_level", "llm"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config file {path}: unknown keys {sorted(unknown)}")

    llm_data = data.pop("llm", {})
    llm_known = {"endpoint_url", "model", "key_env_var", "max_retries",
                 "timeout_ms"}
    llm_unknown = set(llm_data) - llm_known
    if llm_unknown:
        raise ConfigError(
            f"config file {path}: unknown llm keys {sorted(llm_unknown)}"
        )

    config = ServiceConfig(**data, llm=LlmConfig(**llm_data))
    config.validate()
    return config

"""Logging configuration and setup."""

import logging
import logging.handlers
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

COMPONENTS = ("combinatorics", "homology", "oracle", "storage", "render", "cli")

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DEFAULT_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class ComponentLogger:
    """Logger for specific components with configurable levels."""

    def __init__(self, component_name: str, config: Dict[str, Any]):
        self.component_name = component_name
        self.config = config
        self.logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        """Setup logger for this component."""
        logger = logging.getLogger(f"strata_engine.{self.component_name}")
        level_name = self.config.get("level", "INFO")
        logger.setLevel(getattr(logging, level_name))
        logger.propagate = False
        logger.handlers.clear()

        # Console handler (stderr, stdout is reserved for reports)
        if self.config.get("console", {}).get("enabled", True):
            console_level_name = self.config.get("console", {}).get("level", "WARNING")
            console_handler = logging.StreamHandler()
            console_handler.setLevel(getattr(logging, console_level_name))
            console_handler.setFormatter(self._console_formatter())
            logger.addHandler(console_handler)

        # File handler
        if self.config.get("file", {}).get("enabled", False):
            log_file = self.config.get("file", {}).get("path", f"logs/{self.component_name}.log")
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)

            file_handler = logging.handlers.RotatingFileHandler(
                log_file,
                maxBytes=self.config.get("file", {}).get("max_size", 10485760),  # 10MB
                backupCount=self.config.get("file", {}).get("backup_count", 5),
            )
            file_handler.setLevel(getattr(logging, level_name))
            file_handler.setFormatter(
                logging.Formatter(
                    self.config.get("format", DEFAULT_FORMAT),
                    datefmt=self.config.get("date_format", DEFAULT_DATE_FORMAT),
                )
            )
            logger.addHandler(file_handler)

        return logger

    def _console_formatter(self) -> logging.Formatter:
        fmt = self.config.get("format", DEFAULT_FORMAT)
        datefmt = self.config.get("date_format", DEFAULT_DATE_FORMAT)
        if self.config.get("()") != "coloredlogs.ColoredFormatter":
            return logging.Formatter(fmt, datefmt=datefmt)

        import coloredlogs

        level_styles = None
        colors = self.config.get("colors")
        if colors:
            level_styles = {
                level: {"color": style} if isinstance(style, str) else style
                for level, style in colors.items()
            }
        return coloredlogs.ColoredFormatter(fmt, datefmt=datefmt, level_styles=level_styles)

    def set_console_level(self, level_name: str):
        for handler in self.logger.handlers:
            if not isinstance(handler, logging.handlers.RotatingFileHandler):
                handler.setLevel(getattr(logging, level_name))
        if self.logger.level > getattr(logging, level_name):
            self.logger.setLevel(getattr(logging, level_name))

    def get_logger(self) -> logging.Logger:
        """Get the configured logger."""
        return self.logger


class LoggingManager:
    """Manages logging configuration for all components."""

    def __init__(self, config_path: str = "config/logging.yaml"):
        # Resolve config path relative to the strata_engine package root
        base_dir = Path(__file__).resolve().parent.parent
        self.config_path = base_dir / config_path

        self.config = self._load_config()
        self.component_loggers: Dict[str, ComponentLogger] = {}

    def _load_config(self) -> Dict[str, Any]:
        """Load logging configuration from YAML."""
        if not self.config_path.exists():
            return {
                "global": {"format": DEFAULT_FORMAT, "level": "INFO"},
                "components": {name: {"level": "INFO"} for name in COMPONENTS},
                "console": {"enabled": True, "level": "WARNING"},
                "file": {"enabled": False},
            }

        with open(self.config_path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}

    def get_component_logger(self, component_name: str) -> logging.Logger:
        """Get logger for a specific component."""
        if component_name not in self.component_loggers:
            component_config = self.config.get("components", {}).get(component_name, {}) or {}

            full_config = dict(self.config.get("global", {}))
            console_config = self.config.get("console", {})
            if console_config:
                full_config["console"] = dict(console_config)

            file_config = dict(self.config.get("file", {}))
            if "file" in component_config:
                file_config["path"] = component_config["file"]
            full_config["file"] = file_config

            for key, value in component_config.items():
                if key != "file":
                    full_config[key] = value

            self.component_loggers[component_name] = ComponentLogger(component_name, full_config)

        return self.component_loggers[component_name].get_logger()

    def setup_all_loggers(self, console_level: Optional[str] = None):
        """Setup loggers for all components, optionally forcing the console level."""
        for component in COMPONENTS:
            self.get_component_logger(component)
            if console_level:
                self.component_loggers[component].set_console_level(console_level.upper())


# Global logging manager instance
logging_manager = LoggingManager()


def get_logger(component_name: str) -> logging.Logger:
    """Get logger for a component."""
    return logging_manager.get_component_logger(component_name)


def get_component_level(component_name: str) -> str:
    """Get the logging level for a specific component from the config.

    Args:
        component_name: Name of the component (e.g., 'homology', 'oracle')

    Returns:
        Logging level as string (e.g., 'DEBUG', 'INFO')
    """
    config = logging_manager.config
    return config.get("components", {}).get(component_name, {}).get("level", "INFO")

"""Утилиты для логирования."""
import logging
from pathlib import Path
from logging.handlers import RotatingFileHandler
from typing import Optional


def setup_logger(name: str, log_file: Optional[str] = None, level: Optional[str] = None) -> logging.Logger:
    """Настраивает логгер с ротацией файлов."""
    logger = logging.getLogger(name)

    if logger.handlers:
        if level:
            logger.setLevel(getattr(logging, level.upper()))
        return logger

    if log_file is None or level is None:
        from .config import Settings

        settings = Settings()
        log_file = log_file or settings.log_file
        level = level or settings.log_level

    logger.setLevel(getattr(logging, level.upper()))

    log_path = Path(log_file)
    log_path.parent.mkdir(parents=True, exist_ok=True)

    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=10 * 1024 * 1024,
        backupCount=5,
        encoding="utf-8"
    )

    console_handler = logging.StreamHandler()

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    return logger


def set_level(level: str) -> None:
    """Меняет уровень всех логгеров пакета."""
    for name in list(logging.root.manager.loggerDict):
        if name.startswith("src"):
            logging.getLogger(name).setLevel(getattr(logging, level.upper()))

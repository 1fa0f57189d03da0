import logging
import os
from pathlib import Path
from logging.handlers import RotatingFileHandler
from datetime import datetime
from typing import Optional


def default_log_dir() -> Path:
    env_dir = os.getenv('QSPLAYER_LOG_DIR')
    if env_dir:
        return Path(env_dir)

    app_data = os.getenv('APPDATA')
    if app_data:
        return Path(app_data) / "QSPLayer" / "logs"
    return Path.home() / ".qsplayer" / "logs"


def setup_logger(name: str = "qsplayer", log_dir: Optional[Path] = None) -> logging.Logger:
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_dir is None:
        log_dir = default_log_dir()

    try:
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"qsplayer_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"File logging disabled, cannot use {log_dir}: {e}")

    return logger


def set_console_level(level: int):
    """Change the level of the console handler only; the log file keeps DEBUG."""
    for handler in logger.handlers:
        if type(handler) is logging.StreamHandler:
            handler.setLevel(level)


logger = setup_logger()

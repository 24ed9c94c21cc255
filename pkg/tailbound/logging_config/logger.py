"""集中式日誌工廠。

所有 logger 掛在 "tailbound" 之下；console 一律寫 stderr，stdout 留給 CSV。
"""

from __future__ import annotations

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

import colorlog

from tailbound.config.settings import PROJECT_ROOT

ROOT_NAME = "tailbound"
LOG_FILE = "tailbound.log"
_DATEFMT = "%Y-%m-%d %H:%M:%S"
_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "bold_red",
}

_configured = False


def _console_handler() -> logging.Handler:
    handler = colorlog.StreamHandler(sys.stderr)
    handler.setFormatter(colorlog.ColoredFormatter(
        "%(log_color)s%(asctime)s [%(levelname)-8s]%(reset)s %(name)s: %(message)s",
        datefmt=_DATEFMT,
        log_colors=_COLORS,
    ))
    return handler


def _file_handler(log_dir: Path) -> logging.Handler:
    log_dir.mkdir(parents=True, exist_ok=True)
    handler = RotatingFileHandler(
        log_dir / LOG_FILE,
        maxBytes=10 * 1024 * 1024,  # 10 MB
        backupCount=5,
        encoding="utf-8",
    )
    handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)-8s] %(name)s: %(message)s", datefmt=_DATEFMT))
    return handler


def reset_logging() -> None:
    """移除並關閉 tailbound 的所有 handler。"""
    global _configured
    root_logger = logging.getLogger(ROOT_NAME)
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
        handler.close()
    _configured = False


def setup_logging(
    level: str = "INFO",
    file_enabled: bool = True,
    log_dir: str | Path = "data/logs",
    force: bool = False,
) -> logging.Logger:
    """初始化日誌；已初始化時除非 force 否則不重複掛 handler。

    log_dir 為相對路徑時以專案根目錄為基準。
    """
    global _configured
    root_logger = logging.getLogger(ROOT_NAME)
    if _configured and not force:
        return root_logger
    reset_logging()

    root_logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    root_logger.addHandler(_console_handler())
    if file_enabled:
        path = Path(log_dir)
        root_logger.addHandler(_file_handler(path if path.is_absolute() else PROJECT_ROOT / path))

    _configured = True
    return root_logger


def get_logger(name: str) -> logging.Logger:
    """取得具名 logger。使用方式: logger = get_logger("engine.refine")"""
    return logging.getLogger(f"{ROOT_NAME}.{name}")

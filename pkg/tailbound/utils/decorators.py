"""裝飾器工具。"""

import functools
import logging
import time

logger = logging.getLogger("tailbound.utils")


def log_elapsed(label: str | None = None, level: int = logging.INFO):
    """記錄函數執行耗時。

    Args:
        label: 日誌中顯示的名稱，預設為函數名稱
        level: 日誌等級
    """

    def decorator(func):
        name = label or func.__name__

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                logger.log(level, "%s 完成，耗時 %.2f 秒", name, time.perf_counter() - start)

        return wrapper

    return decorator

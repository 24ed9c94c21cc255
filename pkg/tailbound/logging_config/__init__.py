from tailbound.logging_config.logger import get_logger

__all__ = ["get_logger"]

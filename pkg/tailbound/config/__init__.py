from tailbound.config.settings import Settings

__all__ = ["Settings"]

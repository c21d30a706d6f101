# Configuration management module

from .settings_manager import SETTING_TYPES, load_settings, parse_settings, reload_settings

__all__ = ["SETTING_TYPES", "load_settings", "parse_settings", "reload_settings"]

import json
import os
from pathlib import Path
from typing import Dict, Any, Optional
from dataclasses import dataclass, asdict, fields
from .logger import logger


DEFAULT_GRID_SIZE = 4096


@dataclass
class AppSettings:
    # Discretization
    grid_size: int = DEFAULT_GRID_SIZE

    # Synthesis targets
    tol: float = 1e-6
    d_max: Optional[int] = None  # None means grid_size // 4, the bandwidth limit

    # Riemann-Hilbert fixed point
    tol_fp: float = 1e-12
    fp_max_iter: Optional[int] = None

    # Layer stripping maintenance
    renormalize_every: int = 64
    outer_check_every: int = 16

    # Verification
    plancherel_tol: float = 1e-6
    unitarity_tol: float = 1e-10

    # Roundtrip benchmark
    seed: int = 0

    def effective_d_max(self, grid_size: Optional[int] = None) -> int:
        """Configured d_max, else N/4 of grid_size (a signal file may fix N)"""
        if self.d_max is not None:
            return int(self.d_max)
        return (grid_size or self.grid_size) // 4


def settings_home() -> Path:
    env_dir = os.getenv('QSPLAYER_HOME')
    if env_dir:
        return Path(env_dir)
    app_data = os.getenv('APPDATA')
    if app_data:
        return Path(app_data) / "QSPLayer"
    return Path.home() / ".qsplayer"


def env_grid_size() -> Optional[int]:
    """Get the default grid size from QSPLAYER_GRID, if set and numeric"""
    value = os.getenv('QSPLAYER_GRID')
    if not value:
        return None
    try:
        return int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer QSPLAYER_GRID={value!r}")
        return None


class SettingsManager:

    DEFAULT_PROFILES = {
        "fast": {
            "grid_size": 1024,
            "tol": 1e-4,
            "tol_fp": 1e-10,
        },
        "standard": {
            "grid_size": 4096,
            "tol": 1e-6,
            "tol_fp": 1e-12,
        },
        "precise": {
            "grid_size": 8192,
            "tol": 1e-8,
            "tol_fp": 1e-13,
        },
    }

    def __init__(self, settings_dir: Optional[Path] = None):
        self.settings_dir = settings_dir if settings_dir is not None else settings_home()
        self.settings_file = self.settings_dir / "settings.json"
        self.profiles_file = self.settings_dir / "profiles.json"
        self.settings = AppSettings()
        self.custom_profiles: Dict[str, Dict[str, Any]] = {}

        self.load()

    def load(self):
        if self.settings_file.exists():
            try:
                with open(self.settings_file, 'r') as f:
                    data = json.load(f)

                known = {f.name for f in fields(AppSettings)}
                for key, value in data.items():
                    if key in known:
                        setattr(self.settings, key, value)
                    else:
                        logger.debug(f"Ignoring unknown setting {key!r}")
                logger.debug(f"Settings loaded from {self.settings_file}")
            except Exception as e:
                logger.error(f"Failed to load settings: {e}")

        if self.profiles_file.exists():
            try:
                with open(self.profiles_file, 'r') as f:
                    self.custom_profiles = json.load(f)
                    logger.debug(f"Loaded {len(self.custom_profiles)} custom profiles")
            except Exception as e:
                logger.error(f"Failed to load profiles: {e}")

    def save(self) -> bool:
        try:
            self.settings_dir.mkdir(parents=True, exist_ok=True)

            with open(self.settings_file, 'w') as f:
                json.dump(asdict(self.settings), f, indent=2)

            with open(self.profiles_file, 'w') as f:
                json.dump(self.custom_profiles, f, indent=2)

            logger.info("Settings saved successfully")
            return True
        except Exception as e:
            logger.error(f"Failed to save settings: {e}")
            return False

    def get_all_profiles(self) -> Dict[str, Dict[str, Any]]:
        """Get all profiles (default + custom)"""
        profiles = {name: dict(values) for name, values in self.DEFAULT_PROFILES.items()}
        profiles.update(self.custom_profiles)
        return profiles

    def save_custom_profile(self, name: str, values: Dict[str, Any]):
        known = {f.name for f in fields(AppSettings)}
        self.custom_profiles[name] = {k: v for k, v in values.items() if k in known}
        self.save()

    def delete_custom_profile(self, name: str) -> bool:
        if name in self.custom_profiles:
            del self.custom_profiles[name]
            self.save()
            return True
        return False

    def apply_profile(self, profile_name: str, settings: Optional[AppSettings] = None) -> bool:
        """Apply a named profile onto settings (the managed settings by default)"""
        profiles = self.get_all_profiles()

        if profile_name not in profiles:
            logger.warning(f"Unknown profile {profile_name!r}")
            return False

        target = settings if settings is not None else self.settings
        for key, value in profiles[profile_name].items():
            if hasattr(target, key):
                setattr(target, key, value)

        logger.debug(f"Applied profile {profile_name!r}")
        return True

    def resolve(self, profile_name: Optional[str] = None, **overrides) -> AppSettings:
        """Build the effective settings for one run.

        Precedence: explicit overrides > profile > QSPLAYER_GRID (grid only)
        > settings file > defaults. Overrides equal to None are skipped.
        """
        effective = AppSettings(**asdict(self.settings))

        grid = env_grid_size()
        if grid is not None:
            effective.grid_size = grid

        if profile_name:
            self.apply_profile(profile_name, effective)

        for key, value in overrides.items():
            if value is not None and hasattr(effective, key):
                setattr(effective, key, value)

        return effective

    def reset_to_defaults(self):
        """Reset all settings to defaults"""
        self.settings = AppSettings()
        self.custom_profiles.clear()
        self.save()

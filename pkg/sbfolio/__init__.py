_registered_presets_paths = set()
_registered_root = {"_": ""}
_registered_overrides = dict()

__all__ = [
    "install",
    "uninstall",
]

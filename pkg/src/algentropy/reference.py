"""Access to the data files shipped with the package."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

_DATA = "data"


def data_path(*parts: str) -> Path:
    return Path(str(resources.files("algentropy").joinpath(_DATA, *parts)))


def map_path(name: str) -> Path:
    """Path of a bundled map file, e.g. 'hv' or 'f4'."""
    p = data_path("maps", name if name.endswith(".map") else f"{name}.map")
    if not p.is_file():
        raise FileNotFoundError(f"no bundled map named {name!r}")
    return p


def bundled_maps() -> list[str]:
    return sorted(p.stem for p in data_path("maps").glob("*.map"))


def load_reference(name: str) -> dict:
    """Parsed JSON of a reference data file, e.g. 'hv' or 'gf_4d'."""
    p = data_path("reference", name if name.endswith(".json") else f"{name}.json")
    return json.loads(p.read_text())

"""Bundled benchmark scenarios.

Six worlds: four 2D problem types (empty, boxed walls, clutter, cost bands)
and two 5D (empty, random hypercube obstacles).  Geometry is hand-placed to
match the published problem families in spirit; exact coordinates are our
own, as the metadata labels note.
"""

from importlib import resources
from pathlib import Path

BUNDLED = (
    "d2_empty",
    "d2_boxes",
    "d2_clutter",
    "d2_zones",
    "d5_empty",
    "d5_boxes",
)


def scenario_path(name: str) -> Path:
    """Filesystem path of a bundled scenario by short name."""
    if name not in BUNDLED:
        raise KeyError(f"unknown bundled scenario {name!r}; choices: {BUNDLED}")
    with resources.as_file(resources.files(__package__) / f"{name}.json") as p:
        return Path(p)

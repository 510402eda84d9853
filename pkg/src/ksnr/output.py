"""Deterministic CSV/JSON artifact writers shared by the experiment drivers."""

import json
from pathlib import Path


def fmt(value):
    """Shortest round-trip decimal form; identical bytes for identical floats."""
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):
        item = value.item()
        return repr(item) if isinstance(item, float) else str(item)
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_json(path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Instance JSON files.

Layout::

    {"name": ...,
     "application": {"demands": [...], "edges": [[i, j, w], ...]},
     "machines": {"capacities": [...], "link_cost": [[...], ...]}}

``link_cost`` is the dense matrix after shortest-path closure, so every
solver reading the file sees the same costs.
"""

from __future__ import annotations

import json
from pathlib import Path

from .graph import ApplicationGraph, Instance, MachineGraph


def to_dict(instance: Instance) -> dict:
    app, machines = instance.app, instance.machines
    return {
        "name": instance.name,
        "application": {
            "demands": [float(d) for d in app.demands],
            "edges": [[i, j, w] for i, j, w in app.edges],
        },
        "machines": {
            "capacities": [float(c) for c in machines.capacities],
            "link_cost": [[float(x) for x in row] for row in machines.link_cost],
        },
    }


def from_dict(data: dict) -> Instance:
    try:
        app = ApplicationGraph(data["application"]["demands"], data["application"]["edges"])
        machines = MachineGraph(data["machines"]["capacities"], data["machines"]["link_cost"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance: missing or bad field {exc}") from exc
    return Instance(app, machines, str(data.get("name", "instance")))


def dumps(instance: Instance) -> str:
    return json.dumps(to_dict(instance), indent=1) + "\n"


def loads(text: str) -> Instance:
    return from_dict(json.loads(text))


def save(instance: Instance, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(instance))
    return path


def load(path) -> Instance:
    return loads(Path(path).read_text())

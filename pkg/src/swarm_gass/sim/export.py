"""Trajectory CSV and event-log JSONL for replay and plotting."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .world import Event

TRAJECTORY_COLUMNS = ("time", "agent", "team", "x", "y", "z", "alive")


def write_trajectory_csv(path, trajectory: np.ndarray) -> int:
    """Write recorded rows; returns the row count."""
    rows = np.asarray(trajectory).reshape(-1, 7)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for t, a, team, x, y, z, alive in rows:
            w.writerow([f"{t:.1f}", int(a), int(team), repr(float(x)), repr(float(y)),
                        repr(float(z)), int(alive)])
    return rows.shape[0]


def read_trajectory_csv(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data.reshape(-1, 7)


def write_events_jsonl(path, events) -> int:
    with open(path, "w") as fh:
        for ev in events:
            fh.write(json.dumps(ev.to_dict(), sort_keys=True) + "\n")
    return len(events)


def read_events_jsonl(path) -> list[Event]:
    lines = Path(path).read_text().splitlines()
    return [Event.from_dict(json.loads(line)) for line in lines if line.strip()]

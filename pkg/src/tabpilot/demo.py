"""Bundled synthetic demo: a collisions dataset whose target depends on a
temperature signal that lives only in the corpus weather dataset.

The construction makes augmentation measurably useful: temperature carries
well over a quarter of the target variance, so a temporal join of the hourly
weather data onto the daily collisions data must cut the best achievable
error by a wide margin.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

DAYS = 365
START = datetime(2021, 1, 1)

# collisions = BASE + TRIPS_COEF*z_trips - TEMP_COEF*z_temp + noise(NOISE_STD)
BASE = 40.0
TRIPS_COEF = 6.0
TEMP_COEF = 8.0
NOISE_STD = 3.0

TRIPS_MEAN, TRIPS_STD = 5000.0, 900.0
TEMP_MEAN, TEMP_STD = 10.0, 8.0
DIURNAL_AMPLITUDE = 4.0


def _csv(lines: list[str]) -> str:
    return "\n".join(lines) + "\n"


def _write_entry(corpus_dir: Path, stem: str, csv_text: str, meta: dict) -> None:
    (corpus_dir / f"{stem}.csv").write_text(csv_text, encoding="utf-8")
    (corpus_dir / f"{stem}.meta.json").write_text(
        json.dumps(meta, indent=2), encoding="utf-8")


def make_demo(root: str | Path, seed: int = 0) -> dict[str, str]:
    """Write collisions.csv, problem.json, and a three-entry corpus under
    ``root``. Returns the paths keyed by artifact name."""
    rng = np.random.default_rng(seed)
    root = Path(root)
    corpus_dir = root / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)

    dates = [START + timedelta(days=i) for i in range(DAYS)]
    z_trips = rng.standard_normal(DAYS)
    z_temp = rng.standard_normal(DAYS)
    noise = rng.normal(scale=NOISE_STD, size=DAYS)

    trips = np.round(TRIPS_MEAN + TRIPS_STD * z_trips)
    temp_daily = TEMP_MEAN + TEMP_STD * z_temp
    collisions = BASE + TRIPS_COEF * z_trips - TEMP_COEF * z_temp + noise

    lines = ["date,trips,collisions"]
    for d, t, c in zip(dates, trips, collisions):
        lines.append(f"{d.date().isoformat()},{float(t)!r},{float(c)!r}")
    collisions_path = root / "collisions.csv"
    collisions_path.write_text(_csv(lines), encoding="utf-8")

    # hourly weather whose per-day mean equals the daily temperature exactly:
    # a full-period cosine over 24 equally spaced hours sums to zero
    humidity = 60.0 + 15.0 * rng.standard_normal(DAYS)
    w_lines = ["timestamp,temperature,humidity"]
    for i, d in enumerate(dates):
        for h in range(24):
            stamp = (d + timedelta(hours=h)).isoformat()
            t = temp_daily[i] + DIURNAL_AMPLITUDE * math.cos(2 * math.pi * (h - 14) / 24)
            w_lines.append(f"{stamp},{float(t)!r},{float(humidity[i])!r}")
    _write_entry(corpus_dir, "weather", _csv(w_lines), {
        "name": "weather",
        "description": "Hourly temperature and humidity readings for 2021",
        "keywords": ["weather", "temperature", "humidity", "hourly"],
        "columns": [
            {"name": "timestamp", "dtype": "temporal", "granularity": "hour"},
            {"name": "temperature", "dtype": "numeric", "granularity": None},
            {"name": "humidity", "dtype": "numeric", "granularity": None},
        ],
    })

    rides = np.round(trips + 200.0 * rng.standard_normal(DAYS))
    b_lines = ["date,rides"]
    for d, r in zip(dates, rides):
        b_lines.append(f"{d.date().isoformat()},{float(r)!r}")
    _write_entry(corpus_dir, "citibike", _csv(b_lines), {
        "name": "citibike",
        "description": "Daily bike share ride counts for 2021",
        "keywords": ["bike", "rides", "trips"],
        "columns": [
            {"name": "date", "dtype": "temporal", "granularity": "day"},
            {"name": "rides", "dtype": "numeric", "granularity": None},
        ],
    })

    states = ["ny", "nj", "ct", "pa", "ma"]
    c_lines = ["state,population"] + [
        f"{s},{int(v)}" for s, v in zip(states, rng.integers(1, 40, size=5) * 1000000)]
    _write_entry(corpus_dir, "census", _csv(c_lines), {
        "name": "census",
        "description": "State population totals, no temporal column",
        "keywords": ["census", "population"],
        "columns": [
            {"name": "state", "dtype": "categorical", "granularity": None},
            {"name": "population", "dtype": "numeric", "granularity": None},
        ],
    })

    problem = {
        "task_type": "regression",
        "target": "collisions",
        "features": ["trips"],
        "primary_metric": "mae",
        "budget": {"max_pipelines": 12, "time_limit_seconds": 120},
        "eval_method": {"kind": "kfold", "k": 5},
    }
    problem_path = root / "problem.json"
    problem_path.write_text(json.dumps(problem, indent=2), encoding="utf-8")

    return {"dataset": str(collisions_path), "problem": str(problem_path),
            "corpus": str(corpus_dir)}

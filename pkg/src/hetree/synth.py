"""Seeded synthetic datasets for the benchmark harness."""

from __future__ import annotations

import numpy as np

from .ingest import DataObject, Dataset, NUMERIC, sort_dataset

DISTRIBUTIONS = ("uniform", "normal", "zipf")


def synthetic_dataset(size: int, dist: str = "uniform", seed: int = 0) -> Dataset:
    """Draw `size` values from one of three stand-in distributions.

    uniform over [0, 1e6); normal(mu=5e5, sigma=1e5); zipf(s=1.1) ranks
    used directly as magnitudes.
    """
    rng = np.random.default_rng(seed)
    if dist == "uniform":
        values = rng.uniform(0.0, 1e6, size)
    elif dist == "normal":
        values = rng.normal(5e5, 1e5, size)
    elif dist == "zipf":
        values = rng.zipf(1.1, size).astype(float)
    else:
        raise ValueError(f"unknown distribution {dist!r}")
    objects = [
        DataObject(f"urn:item:{i}", "urn:prop:synthetic", float(v))
        for i, v in enumerate(values)
    ]
    return sort_dataset(Dataset(objects, NUMERIC, "urn:prop:synthetic"))

"""Domain types, dataset container, deterministic splits, and the on-disk
dataset format (JSON manifest + little-endian float32 trace payload)."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .rng import SplitMix64

MANIFEST_NAME = "manifest.json"
PAYLOAD_NAME = "traces.f32"
SCHEMA = "thzleaf-dataset-v1"

PAPER_N_T = 760
PAPER_SPAN_PS = 38.0
PAPER_DT_PS = PAPER_SPAN_PS / (PAPER_N_T - 1)


class Orientation(enum.Enum):
    """Which leaf face the beam enters; water always sits on the emitter side."""

    TOP_SIDE = "top"
    BOTTOM_SIDE = "bottom"


@dataclass(frozen=True)
class TimeTrace:
    """One sampled electric-field waveform.

    samples are in arbitrary linear units, dt/t0 in picoseconds.  The stored
    dtype is little-endian float32 so that in-memory traces and the on-disk
    payload are bit-identical.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype="<f4")
        if arr.ndim != 1:
            raise ValueError("trace samples must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("trace samples must be finite")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "samples", arr)

    @property
    def n_t(self) -> int:
        return self.samples.shape[0]

    @property
    def span(self) -> float:
        """Delay from first to last sample, dt * (n_t - 1), in ps."""
        return self.dt * (self.n_t - 1)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeTrace):
            return NotImplemented
        return (
            self.dt == other.dt
            and self.t0 == other.t0
            and self.samples.shape == other.samples.shape
            and self.samples.tobytes() == other.samples.tobytes()
        )


@dataclass(frozen=True, eq=True)
class SampleRecord:
    """One acquisition: trace plus benchmark weight and context.

    g_b is the benchmark water weight in mg, a the absolute air humidity in
    g/m^3, acq_index the position within a measurement series (0 = dry leaf,
    g_b = 0).
    """

    trace: TimeTrace
    g_b: float
    a: float
    series_id: int
    acq_index: int
    orientation: Orientation = Orientation.TOP_SIDE

    def __post_init__(self):
        if self.g_b < 0:
            raise ValueError("g_b must be non-negative")
        if self.a < 0:
            raise ValueError("humidity must be non-negative")
        if self.acq_index < 0:
            raise ValueError("acq_index must be non-negative")
        if self.acq_index == 0 and self.g_b != 0.0:
            raise ValueError("first acquisition of a series must have g_b = 0")


class Dataset:
    """Ordered, immutable collection of records sharing one time base."""

    def __init__(self, records: list[SampleRecord], provenance: dict | None = None):
        self.records = list(records)
        self.provenance = dict(provenance or {})
        if self.records:
            first = self.records[0].trace
            for rec in self.records:
                if (rec.trace.n_t, rec.trace.dt, rec.trace.t0) != (first.n_t, first.dt, first.t0):
                    raise ValueError("all traces in a dataset must share (n_t, dt, t0)")
        self._check_series_order()

    def _check_series_order(self) -> None:
        last_acq: dict[int, int] = {}
        for rec in self.records:
            prev = last_acq.get(rec.series_id)
            if prev is not None and rec.acq_index <= prev:
                raise ValueError(
                    f"acq_index must be strictly increasing within series {rec.series_id}"
                )
            last_acq[rec.series_id] = rec.acq_index

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i: int) -> SampleRecord:
        return self.records[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.records == other.records and self.provenance == other.provenance

    @property
    def n_t(self) -> int:
        return self.records[0].trace.n_t if self.records else 0

    @property
    def dt(self) -> float:
        return self.records[0].trace.dt if self.records else 0.0

    @property
    def t0(self) -> float:
        return self.records[0].trace.t0 if self.records else 0.0

    def traces(self) -> np.ndarray:
        """All traces as one (N, n_t) float32 matrix (copy)."""
        if not self.records:
            return np.zeros((0, 0), dtype="<f4")
        return np.stack([rec.trace.samples for rec in self.records])

    def g_b(self) -> np.ndarray:
        return np.array([rec.g_b for rec in self.records], dtype=float)

    def humidity(self) -> np.ndarray:
        return np.array([rec.a for rec in self.records], dtype=float)

    def series_ids(self) -> np.ndarray:
        return np.array([rec.series_id for rec in self.records], dtype=int)

    def acq_indices(self) -> np.ndarray:
        return np.array([rec.acq_index for rec in self.records], dtype=int)

    def subset(self, indices) -> "Dataset":
        return Dataset([self.records[i] for i in indices], provenance=self.provenance)

    def union(self, other: "Dataset") -> "Dataset":
        prov = {"union_of": [self.provenance, other.provenance]}
        return Dataset(self.records + other.records, provenance=prov)


@dataclass
class PredictionReport:
    """Predictions vs. benchmark, with the two headline error metrics."""

    g_p: np.ndarray
    g_b: np.ndarray
    delta: np.ndarray = field(init=False)
    mae: float = field(init=False)
    median_pct_diff: float = field(init=False)
    epsilon: float = 0.1

    def __post_init__(self):
        from .metrics import mae, median_pct_diff

        self.g_p = np.asarray(self.g_p, dtype=float)
        self.g_b = np.asarray(self.g_b, dtype=float)
        if self.g_p.shape != self.g_b.shape:
            raise ValueError("g_p and g_b must have equal length")
        self.delta = self.g_b - self.g_p
        self.mae = mae(self.g_p, self.g_b)
        self.median_pct_diff = median_pct_diff(self.g_p, self.g_b, self.epsilon)


# ---------------------------------------------------------------------------
# File format


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write manifest.json plus the row-major little-endian float32 payload."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    records_meta = [
        {
            "g_b": rec.g_b,
            "a": rec.a,
            "series_id": rec.series_id,
            "acq_index": rec.acq_index,
            "orientation": rec.orientation.value,
        }
        for rec in dataset.records
    ]
    manifest = {
        "schema": SCHEMA,
        "n_records": len(dataset),
        "n_t": dataset.n_t,
        "dt": dataset.dt,
        "t0": dataset.t0,
        "provenance": dataset.provenance,
        "records": records_meta,
    }
    (path / MANIFEST_NAME).write_text(json.dumps(manifest, indent=1) + "\n")
    payload = dataset.traces().astype("<f4")
    (path / PAYLOAD_NAME).write_bytes(payload.tobytes(order="C"))


def read_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed manifest {manifest_path}: {exc}") from exc
    if manifest.get("schema") != SCHEMA:
        raise ValueError(f"unknown dataset schema {manifest.get('schema')!r}")
    n_records = manifest["n_records"]
    n_t = manifest["n_t"]
    raw = (path / PAYLOAD_NAME).read_bytes()
    expected = n_records * n_t * 4
    if len(raw) != expected:
        raise ValueError(
            f"payload length mismatch: manifest implies {expected} bytes, file has {len(raw)}"
        )
    if len(manifest["records"]) != n_records:
        raise ValueError("manifest record array does not match n_records")
    traces = np.frombuffer(raw, dtype="<f4").reshape(n_records, n_t)
    records = []
    for meta, row in zip(manifest["records"], traces):
        records.append(
            SampleRecord(
                trace=TimeTrace(row, dt=manifest["dt"], t0=manifest["t0"]),
                g_b=meta["g_b"],
                a=meta["a"],
                series_id=meta["series_id"],
                acq_index=meta["acq_index"],
                orientation=Orientation(meta["orientation"]),
            )
        )
    return Dataset(records, provenance=manifest.get("provenance", {}))


def dataset_hash(dataset: Dataset) -> str:
    """SHA-256 over the payload bytes and per-record metadata (not provenance)."""
    h = hashlib.sha256()
    h.update(dataset.traces().astype("<f4").tobytes())
    for rec in dataset.records:
        h.update(
            json.dumps(
                [rec.g_b, rec.a, rec.series_id, rec.acq_index, rec.orientation.value]
            ).encode()
        )
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Splits


def split_random(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint (train, test) with |test| = round(test_fraction * N).

    The assignment is a SplitMix64-driven Fisher-Yates permutation, so it is
    identical across runs and platforms for a fixed seed.
    """
    n = len(dataset)
    if n < 2:
        raise ValueError("need at least 2 records to split")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    n_test = int(round(test_fraction * n))
    n_test = min(max(n_test, 1), n - 1)
    perm = SplitMix64(seed).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return dataset.subset(train_idx), dataset.subset(test_idx)


def split_by_series(dataset: Dataset, held_out_series_ids) -> tuple[Dataset, Dataset]:
    """Hold out complete measurement series as the test set."""
    held = set(int(s) for s in held_out_series_ids)
    present = set(int(s) for s in dataset.series_ids()) if len(dataset) else set()
    unknown = held - present
    if unknown:
        raise ValueError(f"unknown series ids: {sorted(unknown)}")
    train = [r for r in dataset.records if r.series_id not in held]
    test = [r for r in dataset.records if r.series_id in held]
    return (
        Dataset(train, provenance=dataset.provenance),
        Dataset(test, provenance=dataset.provenance),
    )


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint folds covering 0..n-1 whose sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError("need n >= k")
    perm = SplitMix64(seed).permutation(n)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(np.sort(perm[start : start + size]))
        start += size
    return folds

"""Seeded generation of Gaussian features, noise and responses.

Random streams
--------------
Every draw comes from a ``numpy.random.Philox`` generator (counter-based)
keyed by a ``SeedSpec``: the 64-bit master seed is the entropy of a
``numpy.random.SeedSequence`` and the structured ``stream_id`` is its spawn
key, so distinct stream ids give independent streams and equal ones give
bit-identical output. Normal variates use numpy's ziggurat transform
(``Generator.standard_normal``), which is platform independent for a given
numpy release.

Matrices are filled in row-major (C) order, one block per sub-stream:
``A_F``, ``A_S``, ``A_C`` and the noise ``v`` never share a stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError
from .model import Dataset, GroundTruth, ProblemConfig, validate_config

# Sub-stream labels appended to a SeedSpec.
BLOCK_F = 0
BLOCK_S = 1
BLOCK_C = 2
NOISE = 3

# Train/test tags.
TRAIN = 0
TEST = 1

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a structured stream label (tuple of non-negative ints)."""

    master_seed: int
    stream_id: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) < _U64:
            raise ConfigError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        sid = tuple(int(s) for s in self.stream_id)
        if any(s < 0 for s in sid):
            raise ConfigError(f"stream_id entries must be non-negative, got {sid}")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream_id", sid)

    def child(self, *labels: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_id + tuple(labels))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_id)
        return np.random.Generator(np.random.Philox(ss))


def gen_features(rows: int, cols: int, seed: SeedSpec) -> np.ndarray:
    """``rows x cols`` matrix of i.i.d. N(0, 1) entries."""
    if rows < 1:
        raise DimensionError(f"rows must be >= 1, got {rows}")
    if cols < 0:
        raise DimensionError(f"cols must be >= 0, got {cols}")
    if cols == 0:
        return np.empty((rows, 0))
    return seed.generator().standard_normal((rows, cols))


def gen_noise(rows: int, sigma_v: float, seed: SeedSpec) -> np.ndarray:
    """Length-``rows`` vector of i.i.d. N(0, sigma_v**2) entries."""
    if rows < 1:
        raise DimensionError(f"rows must be >= 1, got {rows}")
    if sigma_v < 0:
        raise ConfigError(f"sigma_v must be >= 0, got {sigma_v}")
    return sigma_v * seed.generator().standard_normal(rows)


def gen_response(A_S: np.ndarray, A_C: np.ndarray, truth: GroundTruth, v: np.ndarray) -> np.ndarray:
    """``y = A_S x_S + A_C x_C + v``.

    Also accepts ``v`` of shape ``(rows, k)`` to build ``k`` responses that
    share the same features.
    """
    A_S = np.asarray(A_S, dtype=np.float64)
    A_C = np.asarray(A_C, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if A_S.ndim != 2 or A_C.ndim != 2:
        raise DimensionError("A_S and A_C must be matrices")
    if not (A_S.shape[0] == A_C.shape[0] == v.shape[0]):
        raise DimensionError(
            f"row counts disagree: A_S {A_S.shape[0]}, A_C {A_C.shape[0]}, v {v.shape[0]}"
        )
    if A_S.shape[1] != truth.x_S.shape[0] or A_C.shape[1] != truth.x_C.shape[0]:
        raise DimensionError(
            f"column counts ({A_S.shape[1]}, {A_C.shape[1]}) do not match "
            f"ground truth lengths ({truth.x_S.shape[0]}, {truth.x_C.shape[0]})"
        )
    signal = A_S @ truth.x_S + A_C @ truth.x_C
    if v.ndim == 2:
        signal = signal[:, None]
    return signal + v


def gen_dataset(
    cfg: ProblemConfig,
    truth: GroundTruth,
    rows: int,
    seed: SeedSpec,
    noise_seed: SeedSpec | None = None,
) -> Dataset:
    """Draw a full dataset.

    Feature blocks come from ``seed.child(BLOCK_*)``; the noise comes from
    ``noise_seed.child(NOISE)`` (``seed`` when ``noise_seed`` is omitted), so
    several noise draws can be paired with one feature draw.
    """
    validate_config(cfg)
    A_F = gen_features(rows, cfg.p_F, seed.child(BLOCK_F))
    A_S = gen_features(rows, cfg.p_S, seed.child(BLOCK_S))
    A_C = gen_features(rows, cfg.p_C, seed.child(BLOCK_C))
    v = gen_noise(rows, cfg.sigma_v, (noise_seed or seed).child(NOISE))
    y = gen_response(A_S, A_C, truth, v)
    return Dataset(A_F, A_S, A_C, v, y)


def dump_dataset_csv(ds: Dataset, out_dir: str | Path, prefix: str = "") -> list[Path]:
    """Write each block of ``ds`` to its own CSV file (debugging aid)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in ("A_F", "A_S", "A_C", "v", "y"):
        path = out / f"{prefix}{name}.csv"
        block = getattr(ds, name)
        np.savetxt(path, block.reshape(ds.rows, -1), delimiter=",", fmt="%.17g")
        paths.append(path)
    return paths

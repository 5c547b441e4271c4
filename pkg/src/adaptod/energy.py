"""Energy scoring algebra: global energy, calibrated energy, batch energy normalization.

All scores are linear-scale sums of exponentiated logits. Exponentials are
evaluated with a max-shift so intermediate values never overflow; if the final
linear-scale value itself is not representable in float64 the operation raises
EnergyOverflowError instead of returning Inf.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import EnergyOverflowError, InvalidInputError, ShapeError

_LOG_FLOAT_MAX = math.log(sys.float_info.max)


def _as_logit_vector(logits) -> np.ndarray:
    v = np.asarray(logits, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] < 1:
        raise ShapeError(f"expected a 1-D logit vector, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise InvalidInputError("logits contain non-finite entries")
    return v


def _as_logit_matrix(rows, name: str = "logits") -> np.ndarray:
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D {name} matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise InvalidInputError(f"{name} contain non-finite entries")
    return m


@dataclass(frozen=True)
class LogitBatch:
    """A joint training batch: ID logit rows stacked above outlier logit rows."""

    id_rows: np.ndarray
    out_rows: np.ndarray

    def __post_init__(self):
        id_rows = _as_logit_matrix(self.id_rows, "id_rows")
        out_rows = _as_logit_matrix(self.out_rows, "out_rows")
        if id_rows.shape[0] < 1 or out_rows.shape[0] < 1:
            raise InvalidInputError("a LogitBatch needs at least one ID and one outlier row")
        if id_rows.shape[1] != out_rows.shape[1]:
            raise ShapeError(
                f"class-count mismatch: id rows have k={id_rows.shape[1]}, "
                f"outlier rows have k={out_rows.shape[1]}"
            )
        object.__setattr__(self, "id_rows", id_rows)
        object.__setattr__(self, "out_rows", out_rows)

    @property
    def k(self) -> int:
        return self.id_rows.shape[1]

    @property
    def b_in(self) -> int:
        return self.id_rows.shape[0]

    @property
    def b_out(self) -> int:
        return self.out_rows.shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """All rows, ID first, then outliers."""
        return np.vstack([self.id_rows, self.out_rows])

    def id_indices(self) -> np.ndarray:
        return np.arange(self.b_in)

    def out_indices(self) -> np.ndarray:
        return np.arange(self.b_in, self.b_in + self.b_out)


def global_energy(logits) -> float:
    """Sum of exponentiated logits, Σ_j exp(f_j). Strictly positive."""
    v = _as_logit_vector(logits)
    m = float(v.max())
    total = float(np.exp(v - m).sum())
    # total >= 1, so m bounds the log of the result from below.
    if m + math.log(total) >= _LOG_FLOAT_MAX:
        raise EnergyOverflowError("global energy exceeds float64 range")
    value = math.exp(m) * total
    if not math.isfinite(value):
        raise EnergyOverflowError("global energy exceeds float64 range")
    return value


def exp_logits(logits) -> np.ndarray:
    """Per-class exponentiated logits exp(f_j), with the same overflow guard."""
    v = _as_logit_vector(logits)
    if float(v.max()) >= _LOG_FLOAT_MAX:
        raise EnergyOverflowError("exp(logit) exceeds float64 range")
    return np.exp(v)


def calibrated_energy(logits, p_out) -> float:
    """Energy with each class term damped by the outlier distribution:
    Σ_j exp(f_j) / (1 + p_out_j). Equals global_energy when p_out is all zero."""
    v = _as_logit_vector(logits)
    p = np.asarray(p_out, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] != v.shape[0]:
        raise ShapeError(f"p_out has shape {p.shape}, expected ({v.shape[0]},)")
    if not np.isfinite(p).all() or (p < 0).any():
        raise InvalidInputError("p_out entries must be finite and non-negative")
    m = float(v.max())
    total = float((np.exp(v - m) / (1.0 + p)).sum())
    if total > 0.0 and m + math.log(total) >= _LOG_FLOAT_MAX:
        raise EnergyOverflowError("calibrated energy exceeds float64 range")
    value = math.exp(m) * total
    if not math.isfinite(value):
        raise EnergyOverflowError("calibrated energy exceeds float64 range")
    return value


def batch_energy_normalize(batch) -> np.ndarray:
    """Per-class normalization of exponentiated logits across the whole batch.

    Entry (i, j) is exp(f_j(x_i)) / Σ_i' exp(f_j(x_i')), the denominator running
    over every row (ID and outlier together). Each column sums to 1.
    """
    if isinstance(batch, LogitBatch):
        rows = batch.stacked
    else:
        rows = _as_logit_matrix(batch)
    if rows.shape[0] < 1:
        raise InvalidInputError("empty batch")
    shifted = rows - rows.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=0, keepdims=True)


def class_energy(norm: np.ndarray, row_subset, j: int) -> float:
    """Sum of normalized energies of the given rows in class j."""
    norm = np.asarray(norm, dtype=np.float64)
    idx = np.asarray(row_subset, dtype=np.intp)
    if j < 0 or j >= norm.shape[1]:
        raise IndexError(f"class index {j} out of range for k={norm.shape[1]}")
    if idx.size and (idx.min() < 0 or idx.max() >= norm.shape[0]):
        raise IndexError("row subset contains out-of-range indices")
    if idx.size == 0:
        return 0.0
    return float(norm[idx, j].sum())


def sample_energy(norm: np.ndarray, i: int) -> float:
    """Sum of normalized energies of row i across all classes."""
    norm = np.asarray(norm, dtype=np.float64)
    if i < 0 or i >= norm.shape[0]:
        raise IndexError(f"row index {i} out of range for {norm.shape[0]} rows")
    return float(norm[i].sum())

"""Streaming test-time adaptation of the outlier energy distribution.

Offline: fit a Z-score OOD filter (mean/std of training-ID global energy) and
initialize the outlier distribution from auxiliary outlier logits. Online: for
each test sample, first adapt the distribution if the filter flags the sample
as OOD, then score it with the calibrated energy. One pass, label-free, O(k)
state.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .energy import _as_logit_matrix, calibrated_energy, exp_logits, global_energy
from .errors import InsufficientDataError, InvalidInputError, ShapeError

DEFAULT_ALPHA = 3.0


@dataclass(frozen=True)
class EnergyStats:
    """Training-ID global-energy statistics and the derived filter threshold."""

    mu_in: float
    sigma_in: float
    alpha: float
    r: float

    @classmethod
    def from_moments(cls, mu_in: float, sigma_in: float, alpha: float = DEFAULT_ALPHA):
        if sigma_in < 0:
            raise InvalidInputError("sigma_in must be non-negative")
        if alpha <= 0:
            raise InvalidInputError("alpha must be positive")
        return cls(mu_in=mu_in, sigma_in=sigma_in, alpha=alpha, r=mu_in - alpha * sigma_in)


@dataclass(frozen=True)
class OutlierDistribution:
    """Per-class mean exponentiated logits of accepted OOD evidence, plus its count."""

    values: np.ndarray
    m: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ShapeError(f"values must be 1-D, got shape {v.shape}")
        if not np.isfinite(v).all() or (v < 0).any():
            raise InvalidInputError("values must be finite and non-negative")
        if self.m < 0:
            raise InvalidInputError("count m must be non-negative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def k(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AdaptationEvent:
    sample_index: int
    accepted: bool
    global_energy: float
    calibrated_score: float


def fit_energy_stats(train_id_logits, alpha: float = DEFAULT_ALPHA) -> EnergyStats:
    """Mean and sample std (n-1) of global energy over training-ID logits,
    and the filter threshold R = mu - alpha * sigma."""
    rows = _as_logit_matrix(np.atleast_2d(np.asarray(train_id_logits, dtype=np.float64)))
    if rows.shape[0] < 2:
        raise InsufficientDataError("need at least 2 samples to fit energy statistics")
    energies = np.array([global_energy(r) for r in rows])
    mu = float(energies.mean())
    sigma = math.sqrt(float(((energies - mu) ** 2).sum()) / (energies.size - 1))
    return EnergyStats.from_moments(mu, sigma, alpha)


def init_outlier_distribution(outlier_logits, virtual_count: int = 1) -> OutlierDistribution:
    """Per-class mean of exp(f_j) over the outlier set.

    virtual_count is the pseudo-observation weight the initialization carries in
    later updates; 0 means the first accepted test sample replaces it outright.
    """
    if virtual_count < 0:
        raise InvalidInputError("virtual_count must be non-negative")
    rows = _as_logit_matrix(np.atleast_2d(np.asarray(outlier_logits, dtype=np.float64)))
    if rows.shape[0] < 1:
        raise InsufficientDataError("need at least one outlier sample to initialize")
    ef = np.vstack([exp_logits(r) for r in rows])
    return OutlierDistribution(values=ef.mean(axis=0), m=virtual_count)


def _update(state: OutlierDistribution, ef: np.ndarray) -> OutlierDistribution:
    new_values = (state.m * state.values + ef) / (state.m + 1)
    return OutlierDistribution(values=new_values, m=state.m + 1)


def adapt_and_score(
    state: OutlierDistribution,
    stats: EnergyStats,
    logits,
    sample_index: int = 0,
) -> tuple[OutlierDistribution, float, AdaptationEvent]:
    """One inference step: update the distribution if G(x) < R, then score.

    Returns the post-step state, the calibrated score of the sample under that
    state, and an audit event. A rejected sample returns the input state object
    unchanged.
    """
    g = global_energy(logits)
    if logits_len(logits) != state.k:
        raise ShapeError(f"sample has k={logits_len(logits)}, state has k={state.k}")
    accepted = g < stats.r
    if accepted:
        state = _update(state, exp_logits(logits))
    score = calibrated_energy(logits, state.values)
    return state, score, AdaptationEvent(sample_index, accepted, g, score)


def adapt_and_score_oracle(
    state: OutlierDistribution,
    stats: EnergyStats,
    logits,
    is_true_ood: bool,
    use_label_probability: float,
    rng: np.random.Generator,
    sample_index: int = 0,
) -> tuple[OutlierDistribution, float, AdaptationEvent]:
    """adapt_and_score with the acceptance decision taken from the ground-truth
    label with probability use_label_probability (1.0 = oracle, 0.0 = plain)."""
    if not 0.0 <= use_label_probability <= 1.0:
        raise InvalidInputError("use_label_probability must lie in [0, 1]")
    g = global_energy(logits)
    if logits_len(logits) != state.k:
        raise ShapeError(f"sample has k={logits_len(logits)}, state has k={state.k}")
    if use_label_probability > 0.0 and rng.random() < use_label_probability:
        accepted = bool(is_true_ood)
    else:
        accepted = g < stats.r
    if accepted:
        state = _update(state, exp_logits(logits))
    score = calibrated_energy(logits, state.values)
    return state, score, AdaptationEvent(sample_index, accepted, g, score)


def logits_len(logits) -> int:
    return np.asarray(logits).shape[-1]


def run_stream(
    state: OutlierDistribution,
    stats: EnergyStats,
    logit_stream,
    *,
    freeze: bool = False,
    oracle_labels=None,
    use_label_probability: float = 0.0,
    rng: np.random.Generator | None = None,
    record_events: bool = False,
) -> tuple[list[float], list[AdaptationEvent] | None, OutlierDistribution]:
    """Score a one-pass stream of logit vectors in order.

    freeze=True scores with the initial distribution and never adapts (the
    no-TTA baseline). oracle_labels + use_label_probability > 0 routes each
    acceptance decision through the oracle with that probability; decisions
    draw from rng per sample. Events are recorded only on request, keeping the
    default memory footprint at O(k).
    """
    if use_label_probability > 0.0:
        if oracle_labels is None:
            raise InvalidInputError("use_label_probability > 0 requires oracle_labels")
        if rng is None:
            raise InvalidInputError("oracle mode requires an rng")
    labels_iter = iter(oracle_labels) if oracle_labels is not None else None
    scores: list[float] = []
    events: list[AdaptationEvent] | None = [] if record_events else None
    for i, logits in enumerate(logit_stream):
        is_ood = bool(next(labels_iter)) if labels_iter is not None else False
        try:
            if freeze:
                g = global_energy(logits)
                score = calibrated_energy(logits, state.values)
                event = AdaptationEvent(i, False, g, score)
            elif use_label_probability > 0.0:
                state, score, event = adapt_and_score_oracle(
                    state, stats, logits, is_ood, use_label_probability, rng, sample_index=i
                )
            else:
                state, score, event = adapt_and_score(state, stats, logits, sample_index=i)
        except Exception as exc:
            raise type(exc)(f"sample {i}: {exc}") from exc
        scores.append(score)
        if events is not None:
            events.append(event)
    return scores, events, state


def save_state(path, state: OutlierDistribution, stats: EnergyStats) -> None:
    """Checkpoint the adapter as canonical JSON (decimal text round-trips exactly)."""
    payload = {
        "k": state.k,
        "m": state.m,
        "values": [float(v) for v in state.values],
        "mu_in": stats.mu_in,
        "sigma_in": stats.sigma_in,
        "alpha": stats.alpha,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def load_state(path) -> tuple[OutlierDistribution, EnergyStats]:
    with open(path) as fh:
        payload = json.load(fh)
    values = np.asarray(payload["values"], dtype=np.float64)
    if values.shape[0] != payload["k"]:
        raise ShapeError("snapshot k does not match its values length")
    state = OutlierDistribution(values=values, m=int(payload["m"]))
    stats = EnergyStats.from_moments(payload["mu_in"], payload["sigma_in"], payload["alpha"])
    return state, stats

"""Conversion of measured syndrome currents into corrective rotations.

A negative current is read as evidence that the measurement pushed the
state into the -1 eigenspace. The post-measurement polar angle is
estimated from the scaled current w = 2*I/dI through

    cos(theta) = (w - tanh(g tau / 2)) / (1 - w * tanh(g tau / 2)),

clipped into [-1, 1]; positive currents request no action. The sign
pattern of the currents selects which single-qubit Pauli to rotate
about, and the rotation angle is -theta_bar with cos(theta_bar)
averaged over the negative-current estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .measurement import MeasurementConfig, MeasurementRecord


@dataclass(frozen=True)
class AngleEstimate:
    """cos(theta) inferred from one current; inactive when the current is >= 0."""

    cos_theta: float
    active: bool
    clipped: bool = False


@dataclass(frozen=True)
class FeedbackAction:
    """Pauli word to rotate about and the rotation angle (0 with no operator)."""

    operator: Optional[str]
    angle: float

    def __post_init__(self):
        if self.operator is None and self.angle != 0.0:
            raise ValueError("angle must be 0 when there is no operator")


def estimate_cos_theta(current: float, cfg: MeasurementConfig) -> AngleEstimate:
    """Estimate the post-measurement cos(theta) from one integrated current.

    Currents >= 0 (zero included: no information) yield an inactive
    estimate. Values outside [-1, 1] produced by the noisy current are
    clipped and flagged.
    """
    if cfg.g_tau <= 0.0:
        raise ValueError("g_tau must be > 0")
    if current >= 0.0:
        return AngleEstimate(cos_theta=1.0, active=False)
    w = 2.0 * current / cfg.delta_i
    t = math.tanh(0.5 * cfg.g_tau)
    den = 1.0 - w * t
    if abs(den) < 1e-12:
        raw = math.copysign(1.0, w - t)
        return AngleEstimate(cos_theta=raw, active=True, clipped=True)
    raw = (w - t) / den
    if raw < -1.0:
        return AngleEstimate(cos_theta=-1.0, active=True, clipped=True)
    if raw > 1.0:
        return AngleEstimate(cos_theta=1.0, active=True, clipped=True)
    return AngleEstimate(cos_theta=raw, active=True)


def average_cos_theta(estimates: Sequence[AngleEstimate]) -> float:
    """Uniform mean of cos(theta) over the active estimates."""
    active = [e.cos_theta for e in estimates if e.active]
    if not active:
        raise ValueError("no active estimates to average")
    return math.fsum(active) / len(active)


def _signs(records: Sequence[MeasurementRecord]) -> tuple[int, ...]:
    # exactly-zero currents carry no information and count as positive
    return tuple(1 if r.current >= 0.0 else -1 for r in records)


@dataclass(frozen=True)
class FeedbackResolver:
    """Sign-pattern table plus the shared angle rule for one code."""

    pattern_table: Mapping[tuple[int, ...], str]
    n_records: int

    def operator_for(self, signs: Sequence[int]) -> Optional[str]:
        """Pauli word for a sign pattern; None for the all-positive pattern."""
        signs = tuple(signs)
        if len(signs) != self.n_records:
            raise ValueError(f"expected {self.n_records} signs, got {len(signs)}")
        if all(s > 0 for s in signs):
            return None
        try:
            return self.pattern_table[signs]
        except KeyError:
            raise ValueError(f"sign pattern {signs} is not mapped") from None

    def action(
        self, records: Sequence[MeasurementRecord], cfg: MeasurementConfig
    ) -> FeedbackAction:
        """Feedback rotation for one cycle's measurement records."""
        if len(records) != self.n_records:
            raise ValueError(f"expected {self.n_records} records, got {len(records)}")
        op = self.operator_for(_signs(records))
        if op is None:
            return FeedbackAction(operator=None, angle=0.0)
        estimates = [estimate_cos_theta(r.current, cfg) for r in records]
        theta = math.acos(average_cos_theta(estimates))
        return FeedbackAction(operator=op, angle=-theta)


# Parity signs of (ZZI, IZZ) locate the flipped qubit.
BITFLIP_PATTERN_TABLE: dict[tuple[int, ...], str] = {
    (-1, 1): "XII",
    (-1, -1): "IXI",
    (1, -1): "IIX",
}

# Sign pattern of the four stabilizer currents -> the diagnosed single
# Pauli error, which is its own correction. Identical to the
# anticommutation fingerprint of each error with the stabilizers.
FIVE_QUBIT_PATTERN_TABLE: dict[tuple[int, ...], str] = {
    (1, 1, 1, -1): "XIIII",
    (-1, 1, 1, 1): "IXIII",
    (-1, -1, 1, 1): "IIXII",
    (1, -1, -1, 1): "IIIXI",
    (1, 1, -1, -1): "IIIIX",
    (-1, 1, -1, -1): "YIIII",
    (-1, -1, 1, -1): "IYIII",
    (-1, -1, -1, 1): "IIYII",
    (-1, -1, -1, -1): "IIIYI",
    (1, -1, -1, -1): "IIIIY",
    (-1, 1, -1, 1): "ZIIII",
    (1, -1, 1, -1): "IZIII",
    (1, 1, -1, 1): "IIZII",
    (-1, 1, 1, -1): "IIIZI",
    (1, -1, 1, 1): "IIIIZ",
}

BITFLIP_RESOLVER = FeedbackResolver(pattern_table=BITFLIP_PATTERN_TABLE, n_records=2)
FIVE_QUBIT_RESOLVER = FeedbackResolver(pattern_table=FIVE_QUBIT_PATTERN_TABLE, n_records=4)


def feedback_bitflip(records: Sequence[MeasurementRecord], cfg: MeasurementConfig) -> FeedbackAction:
    """Feedback for the (ZZI, IZZ) parity pair of the three-qubit code."""
    return BITFLIP_RESOLVER.action(records, cfg)


def feedback_five_qubit(records: Sequence[MeasurementRecord], cfg: MeasurementConfig) -> FeedbackAction:
    """Feedback for the four stabilizer currents of the five-qubit code."""
    return FIVE_QUBIT_RESOLVER.action(records, cfg)

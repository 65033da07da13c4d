"""Deterministic synthetic market sessions for the classification experiment.

Real exchange sessions are replaced by a seeded generator whose two classes
differ in the statistics that dominate the classification problem: morning
sessions open with a large auction print and accumulate volume front-loaded
(concave), with a wide and slowly tightening spread; afternoon sessions open
quietly, accumulate volume back-loaded (convex) and keep a tight, quickly
mean-reverting spread. Mid-price dynamics and book imbalance are drawn the
same way for both classes, so those components carry little signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DataError
from .ingest import (
    AFTERNOON,
    MORNING,
    MarketSnapshot,
    SessionSpec,
    format_snapshot_file,
)

# Prices are kept near 1: the session statistics center log mid-price with a
# sum/N convention over N+1 points, which is only well-posed when the log
# level is close to zero (see ingest.normalize_and_featurize).
TICK = 0.0005


@dataclass(frozen=True)
class SyntheticConfig:
    """Generator settings; everything downstream is deterministic in the seed.

    The two-element tuples give (morning, afternoon) parameter ranges.
    """

    sessions_per_class: int
    seed: int = 0
    n_minutes: int = 150
    opening_volume_share: tuple = ((0.06, 0.12), (0.005, 0.02))
    volume_curve_exponent: tuple = ((0.60, 0.85), (1.30, 1.70))
    spread_level_ticks: tuple = ((3.0, 5.0), (1.2, 2.0))
    spread_reversion: tuple = ((0.02, 0.06), (0.25, 0.45))
    price_volatility: float = 0.0008
    imbalance_noise: float = 0.3
    total_volume_range: tuple = (200_000, 800_000)

    def __post_init__(self):
        if self.sessions_per_class < 1:
            raise DataError("sessions_per_class must be >= 1")
        if self.n_minutes < 2:
            raise DataError("n_minutes must be >= 2")


def _session_rng(config: SyntheticConfig, label: str, index: int) -> np.random.Generator:
    code = 0 if label == MORNING else 1
    return np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(code, index)))


def generate_session(config: SyntheticConfig, label: str, index: int) -> list[MarketSnapshot]:
    """One session's snapshot stream, a few prints per minute plus a closing print."""
    rng = _session_rng(config, label, index)
    spec = SessionSpec.for_label(label, config.n_minutes)
    n0, n1 = spec.open_minute, spec.close_minute
    n = spec.n_steps
    cls = 0 if label == MORNING else 1

    total_volume = float(rng.integers(*config.total_volume_range))
    open_share = rng.uniform(*config.opening_volume_share[cls])
    exponent = rng.uniform(*config.volume_curve_exponent[cls])
    spread_level = rng.uniform(*config.spread_level_ticks[cls]) * TICK
    reversion = rng.uniform(*config.spread_reversion[cls])

    # minute-close volume targets: opening burst plus a power-law accumulation
    fractions = open_share + (1 - open_share) * (np.arange(1, n + 1) / n) ** exponent
    jitter = rng.uniform(0, 0.004, size=n)
    fractions = np.maximum.accumulate(np.clip(fractions + jitter, 0, 1))
    fractions[-1] = 1.0
    minute_volume = np.round(fractions * total_volume)

    # per-minute mid price (geometric walk plus a drift that keeps the log
    # level visibly non-constant) and spread (mean-reverting, floored)
    drift = rng.uniform(0.008, 0.02) * (1 if rng.random() < 0.5 else -1)
    log_mid = (
        rng.uniform(-0.01, 0.01)
        + drift * np.linspace(0, 1, n + 1)
        + np.cumsum(rng.normal(0, config.price_volatility, size=n + 1))
    )
    spread = np.empty(n + 1)
    spread[0] = spread_level * rng.uniform(1.5, 2.5)
    shocks = rng.normal(0, 0.35 * TICK, size=n)
    for k in range(n):
        spread[k + 1] = spread[k] + reversion * (spread_level - spread[k]) + shocks[k]
    spread = np.maximum(spread, TICK)

    imbalance = np.tanh(np.cumsum(rng.normal(0, config.imbalance_noise, size=n + 1)) * 0.2)
    base_shares = rng.uniform(5_000, 20_000)

    def snapshot(t: float, minute: int, volume: float) -> MarketSnapshot:
        mid = math.exp(log_mid[minute])
        half_spread = spread[minute] / 2
        ask = round((mid + half_spread) / TICK) * TICK
        bid = round((mid - half_spread) / TICK) * TICK
        if bid >= ask:
            bid = ask - TICK
        depth_skew = imbalance[minute]
        ask_shares = max(1.0, round(base_shares * (1 + depth_skew)))
        bid_shares = max(1.0, round(base_shares * (1 - depth_skew)))
        return MarketSnapshot(t, ask, bid, ask_shares, bid_shares, volume)

    snapshots: list[MarketSnapshot] = []
    previous_close = 0.0
    for k in range(n):  # minute block [n0 + k, n0 + k + 1)
        block_start = n0 + k
        if k == 0:
            # opening print carries the auction volume burst
            first_volume = round(minute_volume[0] * rng.uniform(0.55, 0.9))
            ticks = [(block_start + rng.uniform(0.02, 0.3), max(1.0, first_volume))]
            extra_offsets = np.sort(rng.uniform(0.35, 0.98, size=int(rng.integers(1, 3))))
        else:
            ticks = []
            extra_offsets = np.sort(rng.uniform(0.0, 0.98, size=int(rng.integers(1, 4))))
        low = ticks[-1][1] if ticks else previous_close
        for j, offset in enumerate(extra_offsets):
            frac = (j + 1) / len(extra_offsets)
            volume = round(low + (minute_volume[k] - low) * frac)
            ticks.append((block_start + offset, volume))
        running = previous_close
        for t, volume in ticks:
            running = max(running, min(volume, minute_volume[k]))
            snapshots.append(snapshot(t, k, running))
        previous_close = minute_volume[k]
    snapshots.append(snapshot(float(n1), n, total_volume))
    return snapshots


@dataclass(frozen=True)
class ManifestEntry:
    filename: str
    label: str
    snapshots: int
    final_volume: float


def generate_dataset(config: SyntheticConfig, out_dir: Union[str, Path]) -> list[ManifestEntry]:
    """Write one snapshot file per session plus a manifest; byte-identical per seed."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        entries: list[ManifestEntry] = []
        for label, suffix in ((MORNING, "am"), (AFTERNOON, "pm")):
            for index in range(config.sessions_per_class):
                session = generate_session(config, label, index)
                filename = f"session_{index:04d}.{suffix}"
                (out / filename).write_text(format_snapshot_file(session))
                entries.append(ManifestEntry(filename, label, len(session), session[-1].volume))
        manifest_lines = ["file\tlabel\tsnapshots\tfinal_volume"]
        for e in entries:
            manifest_lines.append(f"{e.filename}\t{e.label}\t{e.snapshots}\t{e.final_volume:.0f}")
        (out / "manifest.tsv").write_text("\n".join(manifest_lines) + "\n")
    except OSError as exc:
        raise DataError(f"cannot write dataset to {out}: {exc}") from None
    return entries

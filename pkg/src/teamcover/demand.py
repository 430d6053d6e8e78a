"""Call-rate fitting and Poisson demand synthesis.

Occurrence logs are stratified by weekday, time band, team type, and
neighborhood. ``fit_rates`` turns a log into expected calls per cell
occurrence (count divided by how often that weekday appears in the log
span); ``generate_calls`` runs the process forward, drawing seeded
Poisson counts per simulated day and cell and aggregating the emitted
records into per-neighborhood, per-type totals ready for instance
construction. Identical seeds give byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, time as dtime, timedelta
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

RateKey = tuple[int, int, str, str]  # (weekday 0-6, band, team type id, neighborhood id)


@dataclass(frozen=True)
class OccurrenceRecord:
    id: str
    neighborhood_id: str
    team_type_id: str
    timestamp: datetime
    service_minutes: float | None = None

    def __post_init__(self) -> None:
        if self.service_minutes is not None and self.service_minutes <= 0:
            raise ValidationError(f"occurrence {self.id}: service_minutes must be > 0")


@dataclass(frozen=True)
class RateTable:
    """Expected calls per (weekday, band, type, neighborhood) cell occurrence."""

    rates: Mapping[RateKey, float]
    band_count: int
    weekday_observations: tuple[int, ...] = (0,) * 7

    def __post_init__(self) -> None:
        if self.band_count < 1 or 24 % self.band_count != 0:
            raise ValidationError(f"band_count must divide 24, got {self.band_count}")
        for key, rate in self.rates.items():
            if rate < 0:
                raise ValidationError(f"rate for {key} is negative")

    @property
    def band_hours(self) -> int:
        return 24 // self.band_count


def band_of(ts: datetime, band_count: int) -> int:
    return ts.hour // (24 // band_count)


def _weekday_occurrences(first: date, last: date) -> list[int]:
    """How many times each weekday occurs in the inclusive span."""
    span = (last - first).days + 1
    counts = [span // 7] * 7
    for offset in range(span % 7):
        counts[(first.weekday() + offset) % 7] += 1
    return counts


def fit_rates(occurrences: Sequence[OccurrenceRecord], band_count: int = 6,
              sampling_fraction: Mapping[str, float] | None = None) -> RateTable:
    """Average calls per cell occurrence over the log's calendar span.

    ``sampling_fraction`` corrects team types whose records were sampled
    (e.g. one day in three logged -> fraction 1/3 scales rates back up).
    """
    if not occurrences:
        raise ValidationError("cannot fit rates from an empty occurrence log")
    if band_count < 1 or 24 % band_count != 0:
        raise ValidationError(f"band_count must divide 24, got {band_count}")
    fractions = dict(sampling_fraction or {})
    for type_id, fraction in fractions.items():
        if not 0.0 < fraction <= 1.0:
            raise ValidationError(f"sampling fraction for {type_id} must lie in (0, 1], got {fraction}")

    counts: dict[RateKey, int] = {}
    first = last = occurrences[0].timestamp.date()
    for rec in occurrences:
        day = rec.timestamp.date()
        first, last = min(first, day), max(last, day)
        key = (day.weekday(), band_of(rec.timestamp, band_count), rec.team_type_id, rec.neighborhood_id)
        counts[key] = counts.get(key, 0) + 1

    weekday_obs = _weekday_occurrences(first, last)
    rates = {
        key: count / weekday_obs[key[0]] / fractions.get(key[2], 1.0)
        for key, count in counts.items()
    }
    return RateTable(rates=rates, band_count=band_count, weekday_observations=tuple(weekday_obs))


def _poisson_inverse(u: float, rate: float) -> int:
    """Inverse-transform Poisson draw; exact for the small per-band rates
    this module works with."""
    p = math.exp(-rate)
    cumulative = p
    k = 0
    while u > cumulative:
        k += 1
        p *= rate / k
        cumulative += p
        if k > 10_000:  # unreachable for sane rates; avoids an infinite loop on inf
            break
    return k


def generate_calls(rates: RateTable, days: int, seed: int,
                   start_date: date = date(2024, 1, 1)
                   ) -> tuple[list[OccurrenceRecord], dict[tuple[str, str], int]]:
    """Simulate ``days`` consecutive days of calls from a rate table.

    Returns the emitted records (timestamps uniform within their band) and
    the aggregated per-(neighborhood, type) totals. Deterministic in the
    seed: cells are visited in sorted order off a single generator.
    """
    if days < 1:
        raise ValidationError(f"days must be >= 1, got {days}")
    rng = np.random.default_rng(seed)
    band_hours = rates.band_hours
    by_weekday: dict[int, list[tuple[RateKey, float]]] = {w: [] for w in range(7)}
    for key in sorted(rates.rates):
        rate = rates.rates[key]
        if rate > 0:
            by_weekday[key[0]].append((key, rate))

    records: list[OccurrenceRecord] = []
    totals: dict[tuple[str, str], int] = {}
    serial = 0
    for day_offset in range(days):
        day = start_date + timedelta(days=day_offset)
        for (weekday, band, type_id, neighborhood), rate in by_weekday[day.weekday()]:
            count = _poisson_inverse(float(rng.random()), rate)
            for _ in range(count):
                serial += 1
                seconds = (band * band_hours + float(rng.random()) * band_hours) * 3600.0
                ts = datetime.combine(day, dtime()) + timedelta(seconds=int(seconds))
                records.append(OccurrenceRecord(f"gen-{serial:06d}", neighborhood, type_id, ts))
                totals[(neighborhood, type_id)] = totals.get((neighborhood, type_id), 0) + 1
    return records, totals


def mean_service_hours(occurrences: Iterable[OccurrenceRecord]) -> float:
    """Arithmetic mean of the recorded service durations, in hours."""
    minutes = [rec.service_minutes for rec in occurrences if rec.service_minutes is not None]
    if not minutes:
        raise ValidationError("no occurrence carries a service duration")
    return sum(minutes) / len(minutes) / 60.0

"""Seeded acceptance sampling and ordered parallel maps.

Candidate points are drawn by index 0, 1, 2, ... so the accepted set depends
only on the seed, the draw function and the acceptance predicate.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import TypeVar

from ghlab.config import LabConfig
from ghlab.errors import DegenerateSampleError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class Sampling:
    """Sampling parameters shared by every measurement.

    Attributes:
        seed: Base seed.
        samples: Number of accepted points.
        value_floor: Minimal |f(g)| for ratio estimates.
        denominator_floor: Minimal |Q(g)| for rational maps.
        max_resample: Consecutive rejections tolerated before giving up.
        workers: Threads for pointwise work; 1 runs inline.
        dual_radius: Norm of the i*m coefficients of dual points.
    """

    seed: int = 42
    samples: int = 50
    value_floor: float = 1e-6
    denominator_floor: float = 1e-3
    max_resample: int = 100
    workers: int = 1
    dual_radius: float = 0.5

    @classmethod
    def from_config(cls, config: LabConfig) -> Sampling:
        return cls(
            seed=config.seed,
            samples=config.samples,
            value_floor=config.value_floor,
            denominator_floor=config.denominator_floor,
            max_resample=config.max_resample,
            workers=config.workers,
            dual_radius=config.dual_radius,
        )

    def with_samples(self, samples: int) -> Sampling:
        return replace(self, samples=samples)


def admissible_points(
    draw: Callable[[int], T],
    accept: Callable[[T], bool],
    sampling: Sampling,
    what: str = "point",
) -> list[T]:
    """Draw candidates by index until ``sampling.samples`` are accepted.

    Raises:
        DegenerateSampleError: After ``max_resample`` consecutive rejections.
    """
    points: list[T] = []
    index = 0
    rejected = 0
    while len(points) < sampling.samples:
        candidate = draw(index)
        index += 1
        if accept(candidate):
            points.append(candidate)
            rejected = 0
            continue
        rejected += 1
        logger.debug("Rejected sample", extra={"what": what, "index": index - 1})
        if rejected >= sampling.max_resample:
            logger.error(
                "Sampling exhausted its resampling budget",
                extra={"what": what, "accepted": len(points), "budget": sampling.max_resample},
            )
            raise DegenerateSampleError(
                f"no admissible {what} after {sampling.max_resample} consecutive draws "
                f"({len(points)} of {sampling.samples} accepted)"
            )
    return points


def indexed_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Map ``fn`` over ``items`` preserving input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))

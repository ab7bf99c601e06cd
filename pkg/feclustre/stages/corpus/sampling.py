"""App-stratified review sampling with largest-remainder allocation."""
import logging
from collections import OrderedDict
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence

import numpy as np

from ...errors import ConfigError
from .models import Review

logger = logging.getLogger(__name__)


def allocate_strata(app_counts: Mapping[str, int], size: int) -> Dict[str, int]:
    """Split `size` across apps proportionally to their counts.

    Exact quotas are floored; leftover seats go first to apps whose floor is 0
    but whose share is positive, then by largest remainder, larger app, app id.
    """
    total = sum(app_counts.values())
    if size < 0 or size > total:
        raise ConfigError(f"sample size {size} is outside [0, {total}]")
    if size == 0:
        return {app: 0 for app in app_counts}
    quotas = {app: Fraction(count * size, total) for app, count in app_counts.items()}
    allocation = {app: int(q) for app, q in quotas.items()}
    leftover = size - sum(allocation.values())
    order = sorted(
        (app for app in app_counts if app_counts[app] > 0),
        key=lambda app: (
            allocation[app] > 0,
            -(quotas[app] - allocation[app]),
            -app_counts[app],
            app,
        ),
    )
    for app in order[:leftover]:
        allocation[app] += 1
    return allocation


def stratified_sample(reviews: Sequence[Review], size: int, seed: int) -> List[Review]:
    """Draw `size` reviews preserving app-level proportions.

    The result keeps corpus order and is reproducible for a fixed seed.
    """
    groups: "OrderedDict[str, List[int]]" = OrderedDict()
    for position, review in enumerate(reviews):
        groups.setdefault(review.app_id, []).append(position)
    allocation = allocate_strata({app: len(ids) for app, ids in groups.items()}, size)
    rng = np.random.default_rng(seed)
    chosen = []
    for app in sorted(groups):
        positions = groups[app]
        take = allocation[app]
        if take == len(positions):
            chosen.extend(positions)
        elif take:
            picks = rng.choice(len(positions), size=take, replace=False)
            chosen.extend(positions[i] for i in picks)
    logger.info(f"Sampled {size} of {len(reviews)} reviews across {len(groups)} apps")
    return [reviews[i] for i in sorted(chosen)]

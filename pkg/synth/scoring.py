# salient/synth/scoring.py

import logging
from collections import Counter

from pydantic import BaseModel, ConfigDict
from sklearn.metrics import adjusted_rand_score

from clustering import DISCARDED, ObjectAssignment

from .generator import SPURIOUS, GroundTruth

logger = logging.getLogger(__name__)


class CoverageError(ValueError):
    """Assignment and ground truth disagree on which tracks exist."""


class PartitionScore(BaseModel):
    model_config = ConfigDict(frozen=True)
    purity: float; adjusted_rand: float; spurious_discard_rate: float


def score_partition(asg: ObjectAssignment, gt: GroundTruth) -> PartitionScore:
    """
    Compare a consolidation result to the generator's ground truth.

    A non-spurious track is pure when the majority true object of its predicted
    object is its own; discarded real tracks are never pure. ARI is computed over
    non-spurious tracks with every discarded track in a singleton cluster.
    """
    predicted, truth = set(asg.labels), set(gt.objects)
    if predicted != truth:
        missing, extra = sorted(truth - predicted), sorted(predicted - truth)
        raise CoverageError(f"Track sets differ: missing from assignment {missing[:5]}, unknown {extra[:5]}.")

    real = sorted(tid for tid, obj in gt.objects.items() if obj is not SPURIOUS)
    spurious = gt.spurious()

    members = {}
    for tid in real:
        label = asg.labels[tid]
        if label is not DISCARDED:
            members.setdefault(label, []).append(gt.objects[tid])
    majority = {label: Counter(objs).most_common(1)[0][0] for label, objs in members.items()}
    pure = sum(
        1 for tid in real
        if asg.labels[tid] is not DISCARDED and majority[asg.labels[tid]] == gt.objects[tid]
    )
    purity = pure / len(real) if real else 1.0

    if real:
        pred_labels = [
            f"object_{asg.labels[tid]}" if asg.labels[tid] is not DISCARDED else f"discarded_{tid}" for tid in real
        ]
        adjusted_rand = float(adjusted_rand_score([gt.objects[tid] for tid in real], pred_labels))
    else:
        adjusted_rand = 1.0

    discarded = sum(1 for tid in spurious if asg.labels[tid] is DISCARDED)
    rate = discarded / len(spurious) if spurious else 1.0

    score = PartitionScore(purity=purity, adjusted_rand=adjusted_rand, spurious_discard_rate=rate)
    logger.debug(f"Partition score: {score}")
    return score

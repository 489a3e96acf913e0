from typing import AbstractSet, Hashable

# Frame-qualified cluster labels are opaque here; any hashable works.


def jaccard(a: AbstractSet[Hashable], b: AbstractSet[Hashable]) -> float:
    """|a & b| / |a | b|, with two empty sets scoring 0.0 so empty tracks never match."""
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def jaccard_distance(a: AbstractSet[Hashable], b: AbstractSet[Hashable]) -> float:
    return 1.0 - jaccard(a, b)

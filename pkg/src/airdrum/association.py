"""Candidate-to-track assignment.

With at most three candidates and two tracks the assignment problem is tiny,
so we enumerate every injective partial mapping exactly instead of running a
general solver.  Distances are measured to the predicted track positions so
that coasting tracks keep attracting their stick.  Candidates farther than
the gate radius from every track are left unassigned, which is what keeps
far false positives out of the filters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import StickId, TipCandidate

_NO_INDEX = 1 << 30  # sorts after any real candidate index in tie-breaking


@dataclass(frozen=True)
class Assignment:
    """Partial injective mapping stick -> candidate index."""

    pairs: dict[StickId, int] = field(default_factory=dict)
    unassigned_candidates: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        idxs = list(self.pairs.values())
        if len(idxs) != len(set(idxs)):
            raise ValueError(f"candidate assigned twice: {self.pairs}")


def _mappings(n_sticks: int, n_cands: int):
    """Yield every injective partial mapping as a tuple of per-stick indices
    (None = unassigned), largest cardinality not required here."""
    def rec(stick: int, used: frozenset[int], acc: tuple):
        if stick == n_sticks:
            yield acc
            return
        yield from rec(stick + 1, used, acc + (None,))
        for c in range(n_cands):
            if c not in used:
                yield from rec(stick + 1, used | {c}, acc + (c,))

    yield from rec(0, frozenset(), ())


def associate(
    candidates: list[TipCandidate] | tuple[TipCandidate, ...],
    tracks,
    gate_radius: float,
) -> Assignment:
    """Pick the injective mapping of sticks to candidates that maximizes
    cardinality, then minimizes total Euclidean distance between predicted
    track positions and candidate centroids, with every assigned pair within
    gate_radius.  Ties break by higher summed confidence, then lower
    candidate indices.

    ``tracks`` maps StickId to a TrackBelief (or None); uninitialized tracks
    do not participate.
    """
    sticks = [s for s in (StickId.LEFT, StickId.RIGHT) if tracks.get(s) is not None and tracks[s].initialized]
    positions = {s: tracks[s].position for s in sticks}
    n = len(candidates)
    if not sticks or n == 0:
        return Assignment({}, frozenset(range(n)))

    # distance matrix, inf outside the gate
    dist: list[dict[StickId, float]] = []
    for cand in candidates:
        row = {}
        for s in sticks:
            px, py = positions[s]
            d = math.hypot(cand.cx - px, cand.cy - py)
            row[s] = d if d <= gate_radius else math.inf
        dist.append(row)

    best_key = None
    best_map: tuple = ()
    for mapping in _mappings(len(sticks), n):
        total = 0.0
        conf = 0.0
        card = 0
        feasible = True
        for si, ci in enumerate(mapping):
            if ci is None:
                continue
            d = dist[ci][sticks[si]]
            if not math.isfinite(d):
                feasible = False
                break
            total += d
            conf += candidates[ci].confidence
            card += 1
        if not feasible:
            continue
        idx_key = tuple(_NO_INDEX if ci is None else ci for ci in mapping)
        key = (-card, total, -conf, idx_key)
        if best_key is None or key < best_key:
            best_key = key
            best_map = mapping

    pairs = {sticks[si]: ci for si, ci in enumerate(best_map) if ci is not None}
    unassigned = frozenset(range(n)) - frozenset(pairs.values())
    return Assignment(pairs, unassigned)


def bootstrap(
    candidates: list[TipCandidate] | tuple[TipCandidate, ...],
    min_conf: float,
) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Seed both tracks from scratch: needs two candidates at or above
    min_conf; the two highest-confidence ones become the sticks, left by
    smaller cx (ties by lower candidate index)."""
    eligible = [(i, c) for i, c in enumerate(candidates) if c.confidence >= min_conf]
    if len(eligible) < 2:
        return None
    eligible.sort(key=lambda ic: (-ic[1].confidence, ic[0]))
    (ia, a), (ib, b) = eligible[0], eligible[1]
    first, second = ((ia, a), (ib, b)) if (a.cx, ia) <= (b.cx, ib) else ((ib, b), (ia, a))
    return ((first[1].cx, first[1].cy), (second[1].cx, second[1].cy))

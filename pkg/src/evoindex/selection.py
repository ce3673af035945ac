"""Result-list construction: exploit/explore mixing and the ordering modes.

A presented list mixes an exploit block O_a (the objects with the largest
cumulative riv over the query terms) and an explore block O_b (a uniform
without-replacement sample of the remaining objects).  The exploit fraction
beta controls the split via ``|O_a| = floor(beta * m + 0.5)``, with beta
either fixed on the grid {1/m, ..., m/m} or drawn Uniform(0,1) per query.

Four ordering modes are supported:

1. completely_random   - one uniform permutation of the whole list.
2. sectionally_random  - exploit block first, uniformly shuffled; explore
                         block after it, in its (already uniform) draw order.
3. partially_random    - exploit block ordered by sequential draws
                         proportional to cumulative riv (without
                         replacement); explore block as in 2.
4. non_random          - exploit block sorted by descending cumulative riv,
                         ties broken by ascending object id; explore block
                         as in 2.

Modes 2-4 always place the whole exploit block before the explore block.
The explore block's internal order is the draw order produced by
``sample_ob``, which is itself a uniform random permutation of the chosen
subset, so one random stream serves both sampling and ordering.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .store import IndexStore, ObjectId, TermId

__all__ = [
    "BetaPolicy",
    "OrderingStrategy",
    "MQList",
    "choose_oa_size",
    "construct_oa",
    "sample_ob",
    "compose_mq",
    "order_mq",
]

log = logging.getLogger(__name__)


def choose_oa_size(beta: float, m: int) -> int:
    """Number of exploit slots: floor(beta * m + 0.5), clamped to [0, m]."""
    if m < 1:
        raise ValueError(f"list length m must be >= 1, got {m}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return min(m, int(beta * m + 0.5))


@dataclass(frozen=True)
class BetaPolicy:
    """Exploit-fraction policy.

    ``beta is None`` means a fresh Uniform(0,1) draw per query.  A fixed
    beta is snapped to the feasible grid {1/m, ..., m/m} at resolve time
    using the same half-up rounding as the size rule, so requesting 0 yields
    the grid minimum 1/m (exactly one exploit slot) and requesting a grid
    value is the identity.
    """

    beta: float | None = None

    def __post_init__(self) -> None:
        if self.beta is not None and not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"fixed beta must lie in [0, 1], got {self.beta}")

    @classmethod
    def fixed(cls, beta: float) -> "BetaPolicy":
        return cls(beta=float(beta))

    @classmethod
    def uniform(cls) -> "BetaPolicy":
        return cls(beta=None)

    @property
    def is_uniform(self) -> bool:
        return self.beta is None

    def resolve(self, m: int, rng: np.random.Generator) -> float:
        if m < 1:
            raise ValueError(f"list length m must be >= 1, got {m}")
        if self.beta is None:
            return float(rng.random())
        k = max(1, min(m, int(self.beta * m + 0.5)))
        return k / m


class OrderingStrategy(Enum):
    COMPLETELY_RANDOM = "completely_random"
    SECTIONALLY_RANDOM = "sectionally_random"
    PARTIALLY_RANDOM = "partially_random"
    NON_RANDOM = "non_random"

    @classmethod
    def from_name(cls, name: str) -> "OrderingStrategy":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown ordering {name!r}; expected one of: {valid}")


class MQList:
    """Ranked result list.  Position i holds rank i+1; ``exploit[i]`` marks
    whether the entry came from the exploit block."""

    __slots__ = ("objects", "exploit")

    def __init__(
        self,
        objects: Sequence[ObjectId],
        exploit: Sequence[bool],
        validate: bool = True,
    ) -> None:
        self.objects = list(objects)
        self.exploit = list(exploit)
        if validate:
            if len(self.objects) != len(self.exploit):
                raise ValueError("objects and exploit flags differ in length")
            if len(set(self.objects)) != len(self.objects):
                raise ValueError("duplicate object in result list")

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        """Yields (rank, object, is_exploit) with ranks 1..n."""
        for i, (obj, ex) in enumerate(zip(self.objects, self.exploit)):
            yield i + 1, obj, ex

    def exploit_objects(self) -> list[ObjectId]:
        return [o for o, ex in zip(self.objects, self.exploit) if ex]

    def explore_objects(self) -> list[ObjectId]:
        return [o for o, ex in zip(self.objects, self.exploit) if not ex]

    def __repr__(self) -> str:
        tags = ["a" if ex else "b" for ex in self.exploit]
        body = ", ".join(f"{o}:{t}" for o, t in zip(self.objects, tags))
        return f"MQList([{body}])"


def accumulate_scores(
    store: IndexStore, terms: Sequence[TermId]
) -> dict[ObjectId, float]:
    """Cumulative riv over `terms` for every object linked under them."""
    scores: dict[ObjectId, float] = {}
    for term in terms:
        posting = store.posting(term)
        if not scores:
            scores.update(posting)
            continue
        get = scores.get
        for obj, r in posting.items():
            scores[obj] = get(obj, 0.0) + r
    return scores


def construct_oa(
    store: IndexStore,
    terms: Sequence[TermId],
    k: int,
    scores: dict[ObjectId, float] | None = None,
) -> list[ObjectId]:
    """The k objects with the largest cumulative riv over `terms`, in
    descending score order; ties broken by ascending object id.

    Objects without any link under the terms score 0 and compete on id.
    Requesting more objects than the store knows returns everything, ranked
    (degenerate, logged).  `scores` may carry a precomputed
    ``accumulate_scores`` map to avoid recomputation.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return []
    population = store.object_count
    if k > population:
        log.warning(
            "construct_oa: k=%d exceeds population %d; returning all", k, population
        )
        k = population
    if scores is None:
        scores = accumulate_scores(store, terms)
    n = len(scores)
    objs = np.fromiter(scores.keys(), dtype=np.int64, count=n)
    vals = np.fromiter(scores.values(), dtype=np.float64, count=n)
    positive = vals > 0.0
    objs = objs[positive]
    vals = vals[positive]
    order = np.lexsort((objs, -vals))[:k]
    ranked = [int(o) for o in objs[order]]
    if len(ranked) < k:
        chosen = set(ranked)
        for obj in store.objects_sorted():
            if obj not in chosen and scores.get(obj, 0.0) <= 0.0:
                ranked.append(obj)
                if len(ranked) == k:
                    break
    return ranked


def sample_ob(
    rng: np.random.Generator, candidates: Iterable[ObjectId], count: int
) -> list[ObjectId]:
    """Uniform without-replacement sample of `count` candidates.

    Every size-count subset is equally likely and the internal draw order is
    kept (first draw uniform over J, second over the J-1 left, and so on),
    so the returned list is a uniform random permutation of the subset.
    """
    pool = sorted(candidates)
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count > len(pool):
        raise ValueError(f"count {count} exceeds candidate pool size {len(pool)}")
    return _sample_excluding(rng, pool, None, count)


def _sample_excluding(
    rng: np.random.Generator,
    pool: Sequence[ObjectId],
    excluded: set[ObjectId] | None,
    count: int,
) -> list[ObjectId]:
    """Rejection-sample `count` distinct pool entries not in `excluded`,
    preserving draw order.  The caller guarantees enough eligible entries.

    Draws are buffered in blocks but consumed one at a time, so each
    accepted entry is still a uniform pick over the remaining pool.
    """
    if count == 0:
        return []
    n = len(pool)
    chosen: list[ObjectId] = []
    seen: set[ObjectId] = set() if excluded is None else set(excluded)
    while len(chosen) < count:
        need = count - len(chosen)
        for i in rng.integers(0, n, size=need + (need >> 1) + 8):
            obj = pool[i]
            if obj in seen:
                continue
            seen.add(obj)
            chosen.append(obj)
            if len(chosen) == count:
                break
    return chosen


def compose_mq(oa: Sequence[ObjectId], ob: Sequence[ObjectId]) -> MQList:
    """Join the exploit and explore blocks into one (yet unordered) list."""
    oa = list(oa)
    ob = list(ob)
    overlap = set(oa) & set(ob)
    if overlap:
        raise ValueError(f"exploit and explore blocks overlap: {sorted(overlap)}")
    return MQList(oa + ob, [True] * len(oa) + [False] * len(ob))


def order_mq(
    mq: MQList,
    strategy: OrderingStrategy,
    store: IndexStore,
    terms: Sequence[TermId],
    rng: np.random.Generator,
    scores: dict[ObjectId, float] | None = None,
) -> MQList:
    """Assign the final presentation order.  See the module docstring for
    the four modes.  The input's explore block order is treated as the
    uniform draw order from sample_ob and is kept for modes 2-4.  `scores`
    may carry a precomputed ``accumulate_scores`` map."""
    if len(mq) == 0:
        raise ValueError("cannot order an empty result list")

    if strategy is OrderingStrategy.COMPLETELY_RANDOM:
        perm = rng.permutation(len(mq))
        return MQList(
            [mq.objects[i] for i in perm],
            [mq.exploit[i] for i in perm],
            validate=False,
        )

    oa = mq.exploit_objects()
    ob = mq.explore_objects()

    if strategy is OrderingStrategy.SECTIONALLY_RANDOM:
        perm = rng.permutation(len(oa))
        oa = [oa[i] for i in perm]
    else:
        if scores is None:
            scores = accumulate_scores(store, terms)
        if strategy is OrderingStrategy.PARTIALLY_RANDOM:
            oa = _proportional_order(oa, scores, rng)
        elif strategy is OrderingStrategy.NON_RANDOM:
            get = scores.get
            oa = [o for _, o in sorted((-get(o, 0.0), o) for o in oa)]
        else:  # pragma: no cover - enum is exhaustive
            raise ValueError(f"unhandled strategy {strategy}")

    return MQList(oa + ob, [True] * len(oa) + [False] * len(ob), validate=False)


def _proportional_order(
    oa: list[ObjectId],
    scores: dict[ObjectId, float],
    rng: np.random.Generator,
) -> list[ObjectId]:
    """Sequential proportional-to-score draws without replacement.

    The first pick lands on object j with probability score_j / sum(scores);
    scores are renormalized over the remainder after each pick.  When every
    remaining score is 0 the rest is ordered uniformly at random.
    """
    if len(oa) <= 1:
        return list(oa)
    remaining = list(oa)
    weights = [scores.get(o, 0.0) for o in remaining]
    ordered: list[ObjectId] = []
    while remaining:
        total = sum(weights)
        if total <= 0.0:
            perm = rng.permutation(len(remaining))
            ordered.extend(remaining[i] for i in perm)
            break
        target = rng.random() * total
        acc = 0.0
        pick = len(remaining) - 1
        for i, w in enumerate(weights):
            acc += w
            if target < acc:
                pick = i
                break
        ordered.append(remaining.pop(pick))
        weights.pop(pick)
    return ordered

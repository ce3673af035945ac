"""Simulated user traffic: ground truth, Poisson arrivals, queries, clicks.

Ground truth is a bipartite pertinence relation between terms and objects.
Users arrive as a Poisson process, issue queries whose terms are new, known,
or a mix, and click exactly the presented objects that are pertinent to at
least one query term (or nothing when the whole list is irrelevant).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .engine import Feedback, Query
from .selection import MQList
from .store import ObjectId, TermId

__all__ = [
    "GroundTruth",
    "ArrivalProcess",
    "next_interarrival",
    "QueryCase",
    "QueryGenerator",
    "VocabularyState",
    "generate_query",
    "simulate_click",
]

log = logging.getLogger(__name__)


class GroundTruth:
    """Immutable set of pertinent (term, object) pairs."""

    __slots__ = ("pairs", "_object_terms", "term_ids", "object_ids")

    def __init__(self, pairs: Iterable[tuple[TermId, ObjectId]]) -> None:
        self.pairs = frozenset((int(t), int(o)) for t, o in pairs)
        if not self.pairs:
            raise ValueError("ground truth must contain at least one pair")
        object_terms: dict[ObjectId, set[TermId]] = {}
        for t, o in self.pairs:
            object_terms.setdefault(o, set()).add(t)
        self._object_terms = object_terms
        self.term_ids = tuple(sorted({t for t, _ in self.pairs}))
        self.object_ids = tuple(sorted(object_terms))

    @property
    def size(self) -> int:
        """Number of pertinent pairs (the unexplored population at t=0)."""
        return len(self.pairs)

    def terms_of(self, obj: ObjectId) -> frozenset[TermId]:
        terms = self._object_terms.get(obj)
        return frozenset(terms) if terms is not None else frozenset()

    def relevant(self, obj: ObjectId, terms: Sequence[TermId]) -> bool:
        """True when `obj` is pertinent to at least one of `terms`."""
        mine = self._object_terms.get(obj)
        if mine is None:
            return False
        for t in terms:
            if t in mine:
                return True
        return False

    @classmethod
    def random_bipartite(
        cls, n_terms: int, n_objects: int, degree: int, rng: np.random.Generator
    ) -> "GroundTruth":
        """Random relation where every object is pertinent to exactly
        `degree` distinct terms drawn uniformly; size = n_objects * degree."""
        if n_terms < 1 or n_objects < 1:
            raise ValueError("need at least one term and one object")
        if not 1 <= degree <= n_terms:
            raise ValueError(f"degree must lie in [1, {n_terms}], got {degree}")
        pairs = []
        for obj in range(n_objects):
            if degree == n_terms:
                terms = np.arange(n_terms)
            else:
                terms = rng.choice(n_terms, size=degree, replace=False)
            pairs.extend((int(t), obj) for t in terms)
        return cls(pairs)

    def save(self, path) -> None:
        """One line per pair, `term_id,object_id`, sorted."""
        with open(path, "w", encoding="ascii") as fh:
            for t, o in sorted(self.pairs):
                fh.write(f"{t},{o}\n")

    @classmethod
    def load(cls, path) -> "GroundTruth":
        pairs = []
        with open(path, "r", encoding="ascii") as fh:
            for i, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise ValueError(f"bad truth line {i}: {line!r}")
                pairs.append((int(parts[0]), int(parts[1])))
        return cls(pairs)


def next_interarrival(rng: np.random.Generator, lam: float) -> float:
    """Exponential gap between arrivals: -ln(U)/lambda with U ~ Uniform(0,1).

    U is drawn from the open interval, so the gap is strictly positive and
    finite.
    """
    if not lam > 0:
        raise ValueError(f"arrival rate must be positive, got {lam}")
    u = rng.random()
    while u == 0.0:  # numpy draws from [0, 1); re-draw the measure-zero edge
        u = rng.random()
    return -math.log(u) / lam


@dataclass(frozen=True)
class ArrivalProcess:
    """Poisson arrival stream with rate `lam` (events per day)."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"arrival rate must be positive, got {self.lam}")

    def next(self, rng: np.random.Generator) -> float:
        return next_interarrival(rng, self.lam)


class QueryCase(Enum):
    ALL_NEW = "all_new"
    ALL_EXISTING = "all_existing"
    HYBRID = "hybrid"


class VocabularyState:
    """Tracks which terms of a fixed universe have appeared in queries."""

    __slots__ = ("_seen_list", "_seen_set", "_unseen", "_unseen_pos")

    def __init__(self, universe: Iterable[TermId]) -> None:
        unseen = sorted(set(universe))
        if not unseen:
            raise ValueError("vocabulary universe must not be empty")
        self._unseen: list[TermId] = unseen
        self._unseen_pos = {t: i for i, t in enumerate(unseen)}
        self._seen_list: list[TermId] = []
        self._seen_set: set[TermId] = set()

    @property
    def seen_count(self) -> int:
        return len(self._seen_list)

    @property
    def unseen_count(self) -> int:
        return len(self._unseen)

    def is_seen(self, term: TermId) -> bool:
        return term in self._seen_set

    def mark_seen(self, terms: Iterable[TermId]) -> None:
        for term in terms:
            pos = self._unseen_pos.pop(term, None)
            if pos is None:
                continue
            last = self._unseen.pop()
            if last != term:
                self._unseen[pos] = last
                self._unseen_pos[last] = pos
            self._seen_list.append(term)
            self._seen_set.add(term)

    def _sample(self, rng: np.random.Generator, pool: list[TermId], n: int) -> list[TermId]:
        chosen: list[TermId] = []
        seen: set[TermId] = set()
        size = len(pool)
        while len(chosen) < n:
            t = pool[int(rng.integers(0, size))]
            if t in seen:
                continue
            seen.add(t)
            chosen.append(t)
        return chosen

    def sample_unseen(self, rng: np.random.Generator, n: int) -> list[TermId]:
        return self._sample(rng, self._unseen, n)

    def sample_seen(self, rng: np.random.Generator, n: int) -> list[TermId]:
        return self._sample(rng, self._seen_list, n)


@dataclass(frozen=True)
class QueryGenerator:
    """Mix of query cases and the per-query term-count range.

    case_mix gives the probabilities of (all_new, all_existing, hybrid) and
    must sum to 1.  Term counts are drawn uniformly from
    [terms_per_query[0], terms_per_query[1]].
    """

    case_mix: tuple[float, float, float] = (0.25, 0.5, 0.25)
    terms_per_query: tuple[int, int] = (1, 3)

    def __post_init__(self) -> None:
        if len(self.case_mix) != 3 or any(p < 0 for p in self.case_mix):
            raise ValueError(f"case_mix must be three probabilities, got {self.case_mix}")
        if abs(sum(self.case_mix) - 1.0) > 1e-9:
            raise ValueError(f"case_mix must sum to 1, got {self.case_mix}")
        lo, hi = self.terms_per_query
        if lo < 1 or hi < lo:
            raise ValueError(f"bad terms_per_query range {self.terms_per_query}")


def generate_query(
    rng: np.random.Generator, gen: QueryGenerator, vocab: VocabularyState
) -> tuple[Query, QueryCase]:
    """Draw a case from the mix and sample distinct terms accordingly.

    Degenerate states fall back to a satisfiable case (logged at debug):
    all_existing before anything was seen becomes all_new; all_new with the
    universe exhausted becomes all_existing; hybrid needs both sides and at
    least two terms.  The caller decides when to mark the returned terms as
    seen (``vocab.mark_seen``), so the case tag always reflects the state
    at generation time.
    """
    lo, hi = gen.terms_per_query
    n = int(rng.integers(lo, hi + 1))
    roll = rng.random()
    if roll < gen.case_mix[0]:
        case = QueryCase.ALL_NEW
    elif roll < gen.case_mix[0] + gen.case_mix[1]:
        case = QueryCase.ALL_EXISTING
    else:
        case = QueryCase.HYBRID

    if case is QueryCase.ALL_EXISTING and vocab.seen_count == 0:
        log.debug("generate_query: no term seen yet, falling back to all_new")
        case = QueryCase.ALL_NEW
    if case is QueryCase.ALL_NEW and vocab.unseen_count == 0:
        log.debug("generate_query: universe exhausted, falling back to all_existing")
        case = QueryCase.ALL_EXISTING
    if case is QueryCase.HYBRID:
        if vocab.seen_count == 0 or vocab.unseen_count == 0 or hi < 2:
            fallback = (
                QueryCase.ALL_NEW if vocab.unseen_count > 0 else QueryCase.ALL_EXISTING
            )
            log.debug("generate_query: hybrid unsatisfiable, falling back to %s", fallback)
            case = fallback

    if case is QueryCase.ALL_NEW:
        n = min(n, vocab.unseen_count)
        terms = vocab.sample_unseen(rng, n)
    elif case is QueryCase.ALL_EXISTING:
        n = min(n, vocab.seen_count)
        terms = vocab.sample_seen(rng, n)
    else:
        n = max(2, n)
        n_new = int(rng.integers(1, n))
        n_new = min(n_new, vocab.unseen_count)
        n_old = min(n - n_new, vocab.seen_count)
        terms = vocab.sample_unseen(rng, n_new) + vocab.sample_seen(rng, n_old)
    return Query(tuple(terms)), case


def simulate_click(
    presented: MQList,
    truth: GroundTruth,
    query: Query,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Feedback:
    """Deterministic pertinence clicks: an object is clicked if and only if
    it is pertinent to at least one query term; an all-irrelevant list gets
    no clicks at all.

    `noise` flips each per-object click decision independently with the
    given probability (default 0 keeps the rule exact); it requires an rng.
    """
    if noise < 0 or noise > 1:
        raise ValueError(f"noise must lie in [0, 1], got {noise}")
    if noise > 0 and rng is None:
        raise ValueError("noise > 0 requires an rng")
    terms = query.terms
    object_terms = truth._object_terms
    clicked: list[ObjectId] = []
    if noise == 0.0:
        if len(terms) == 1:
            term = terms[0]
            for o in presented.objects:
                mine = object_terms.get(o)
                if mine is not None and term in mine:
                    clicked.append(o)
        else:
            for o in presented.objects:
                mine = object_terms.get(o)
                if mine is not None and not mine.isdisjoint(terms):
                    clicked.append(o)
    else:
        for o in presented.objects:
            mine = object_terms.get(o)
            pertinent = mine is not None and not mine.isdisjoint(terms)
            if pertinent != (rng.random() < noise):
                clicked.append(o)
    return Feedback(tuple(clicked))

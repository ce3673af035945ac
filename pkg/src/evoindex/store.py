"""Dynamic relevance index: scored term-object links with threshold promotion.

The store keeps one non-negative relevance index value (riv) per
(term, object) link.  Scores grow through reinforcement and shrink through
penalties, in steps of ``weight * relevance_base``.  A link whose score
reaches the promotion threshold counts as explored; below the threshold it
is still being evaluated.  Links can be removed outright, either one pair at
a time or everything known about an object (deconstruction).

Terms and objects are opaque non-negative integer ids.  Mapping of human
readable strings to term ids is the caller's concern (the HTTP gateway keeps
a persistent dictionary for that).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, Iterator, Mapping

TermId = int
ObjectId = int

__all__ = ["TermId", "ObjectId", "IndexClass", "IndexStore"]


class IndexClass(Enum):
    """Classification of a (term, object) pair relative to the store."""

    EXPLORED = "explored"
    UNEXPLORED = "unexplored"
    ABSENT = "absent"


class IndexStore:
    """Mutable collection of scored term-object links.

    Parameters
    ----------
    threshold:
        Promotion threshold.  A link with riv >= threshold is explored
        (the boundary counts as explored).
    relevance_base:
        Base reward magnitude; every reinforcement or penalty moves a score
        by ``weight * relevance_base``.
    r_init:
        Score assigned to freshly created links.  Must sit strictly between
        0 and the threshold so new links start unexplored.
    """

    __slots__ = (
        "threshold",
        "relevance_base",
        "r_init",
        "total_riv",
        "_postings",
        "_object_terms",
        "_explored",
        "_link_count",
        "_objects_cache",
    )

    def __init__(
        self,
        threshold: float = 10.0,
        relevance_base: float = 1.0,
        r_init: float = 1.0,
    ) -> None:
        if not threshold > 0:
            raise ValueError(f"threshold must be positive, got {threshold}")
        if not relevance_base > 0:
            raise ValueError(f"relevance_base must be positive, got {relevance_base}")
        if not 0 < r_init < threshold:
            raise ValueError(
                f"r_init must lie strictly between 0 and threshold, got {r_init}"
            )
        self.threshold = float(threshold)
        self.relevance_base = float(relevance_base)
        self.r_init = float(r_init)
        self.total_riv = 0.0
        # term id -> {object id -> riv}
        self._postings: dict[TermId, dict[ObjectId, float]] = {}
        # object id -> set of term ids it is linked under
        self._object_terms: dict[ObjectId, set[TermId]] = {}
        self._explored = 0
        self._link_count = 0
        self._objects_cache: list[ObjectId] | None = None

    # ------------------------------------------------------------------
    # introspection

    @property
    def link_count(self) -> int:
        """Number of stored (term, object) links."""
        return self._link_count

    @property
    def explored_count(self) -> int:
        """Number of links at or above the threshold (the index pool)."""
        return self._explored

    @property
    def unexplored_count(self) -> int:
        """Number of stored links below the threshold (the index generator)."""
        return self._link_count - self._explored

    @property
    def object_count(self) -> int:
        return len(self._object_terms)

    def has_object(self, obj: ObjectId) -> bool:
        return obj in self._object_terms

    def objects_sorted(self) -> list[ObjectId]:
        """All object ids known to the store, ascending.  Cached between
        changes to the object set."""
        if self._objects_cache is None:
            self._objects_cache = sorted(self._object_terms)
        return self._objects_cache

    def terms(self) -> Iterator[TermId]:
        return iter(self._postings)

    def posting(self, term: TermId) -> Mapping[ObjectId, float]:
        """Read-only view of the riv map under one term (empty if unknown)."""
        return self._postings.get(term, {})

    def riv(self, term: TermId, obj: ObjectId) -> float | None:
        """Stored riv for the pair, or None when absent."""
        d = self._postings.get(term)
        if d is None:
            return None
        return d.get(obj)

    def classify(self, term: TermId, obj: ObjectId) -> IndexClass:
        d = self._postings.get(term)
        r = d.get(obj) if d is not None else None
        if r is None:
            return IndexClass.ABSENT
        return IndexClass.EXPLORED if r >= self.threshold else IndexClass.UNEXPLORED

    def recompute_total(self) -> float:
        """Sum every stored riv from scratch (conservation check)."""
        return math.fsum(r for d in self._postings.values() for r in d.values())

    # ------------------------------------------------------------------
    # mutation

    def _create_link(self, term: TermId, obj: ObjectId, riv: float) -> None:
        d = self._postings.get(term)
        if d is None:
            d = self._postings[term] = {}
        d[obj] = riv
        terms = self._object_terms.get(obj)
        if terms is None:
            self._object_terms[obj] = {term}
            self._objects_cache = None
        else:
            terms.add(term)
        self._link_count += 1
        if riv >= self.threshold:
            self._explored += 1
        self.total_riv += riv

    def init_minimal_index(self, obj: ObjectId, terms: Iterable[TermId]) -> int:
        """Create absent links (obj under each term) at r_init.

        Existing links are left untouched.  Returns the number of links
        created.  An empty term collection is rejected.
        """
        terms = list(terms)
        if not terms:
            raise ValueError("init_minimal_index requires at least one term")
        created = 0
        for term in terms:
            d = self._postings.get(term)
            if d is not None and obj in d:
                continue
            self._create_link(term, obj, self.r_init)
            created += 1
        return created

    def reinforce(
        self, term: TermId, obj: ObjectId, weight: float
    ) -> tuple[float, float, bool]:
        """Raise the pair's riv by ``weight * relevance_base``.

        An absent pair is first created at r_init, then reinforced; in that
        case the returned delta includes the creation mass so the delta
        always equals the change in total_riv.

        Returns (new riv, delta, promoted) where promoted is True when this
        call moved the pair from below the threshold to at-or-above it.
        """
        if not 0.0 < weight <= 1.0:
            raise ValueError(f"weight must lie in (0, 1], got {weight}")
        step = weight * self.relevance_base
        d = self._postings.get(term)
        old = d.get(obj) if d is not None else None
        if old is None:
            new = self.r_init + step
            self._create_link(term, obj, new)
            # _create_link already added `new` to total and counted promotion
            return new, new, new >= self.threshold
        new = old + step
        if d is None:  # unreachable, keeps type-checkers calm
            raise AssertionError
        d[obj] = new
        self.total_riv += step
        promoted = old < self.threshold <= new
        if promoted:
            self._explored += 1
        return new, step, promoted

    def penalize(
        self, term: TermId, obj: ObjectId, weight: float
    ) -> tuple[float, float, bool]:
        """Lower the pair's riv by ``weight * relevance_base``, clamped at 0.

        An absent pair is a no-op with delta 0 (no link is created).
        Returns (new riv, delta, demoted); delta is <= 0.
        """
        if not 0.0 < weight <= 1.0:
            raise ValueError(f"weight must lie in (0, 1], got {weight}")
        d = self._postings.get(term)
        old = d.get(obj) if d is not None else None
        if old is None:
            return 0.0, 0.0, False
        new = old - weight * self.relevance_base
        if new < 0.0:
            new = 0.0
        if d is None:
            raise AssertionError
        d[obj] = new
        delta = new - old
        self.total_riv += delta
        demoted = old >= self.threshold > new
        if demoted:
            self._explored -= 1
        return new, delta, demoted

    def deconstruct(self, obj: ObjectId, term: TermId | None = None) -> int:
        """Remove links: one pair when `term` is given, else every link of
        `obj`.  Returns the number of links removed (0 when nothing matched).

        A fully deconstructed object stops being known to the store, so it
        can no longer appear in any selection until re-initialized.
        """
        if term is not None:
            d = self._postings.get(term)
            if d is None or obj not in d:
                return 0
            self._drop(term, obj, d)
            return 1
        terms = self._object_terms.get(obj)
        if not terms:
            return 0
        removed = 0
        for t in list(terms):
            self._drop(t, obj, self._postings[t])
            removed += 1
        return removed

    def _drop(self, term: TermId, obj: ObjectId, d: dict[ObjectId, float]) -> None:
        riv = d.pop(obj)
        if not d:
            del self._postings[term]
        self.total_riv -= riv
        self._link_count -= 1
        if riv >= self.threshold:
            self._explored -= 1
        terms = self._object_terms[obj]
        terms.discard(term)
        if not terms:
            del self._object_terms[obj]
            self._objects_cache = None

    # ------------------------------------------------------------------
    # queries over many links

    def cumulative_riv(self, terms: Iterable[TermId], obj: ObjectId) -> float:
        """Sum of the pair rivs of `obj` over `terms`; absent pairs add 0."""
        terms = tuple(terms)
        if not terms:
            raise ValueError("cumulative_riv requires at least one term")
        total = 0.0
        postings = self._postings
        for term in terms:
            d = postings.get(term)
            if d is not None:
                r = d.get(obj)
                if r is not None:
                    total += r
        return total

    def count_unexplored(self, truth) -> int:
        """Number of ground-truth pairs not yet explored (absent counts too).

        `truth` is either an iterable of (term, object) pairs or any object
        exposing a `pairs` attribute holding them.
        """
        pairs = getattr(truth, "pairs", truth)
        postings = self._postings
        h = self.threshold
        n = 0
        for term, obj in pairs:
            d = postings.get(term)
            r = d.get(obj) if d is not None else None
            if r is None or r < h:
                n += 1
        return n

    def top_objects(self, term: TermId, k: int) -> list[tuple[ObjectId, float]]:
        """The k highest-riv objects under one term (ties by ascending id)."""
        items = self._postings.get(term, {})
        ranked = sorted(items.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]

    # ------------------------------------------------------------------
    # serialization: header line "h,R,r_init" then one line per link,
    # "term_id,object_id,riv", sorted by (term, object).  Floats use repr
    # so the decimal text parses back bit-exactly.

    def to_text(self) -> str:
        lines = [f"{self.threshold!r},{self.relevance_base!r},{self.r_init!r}"]
        for term in sorted(self._postings):
            d = self._postings[term]
            for obj in sorted(d):
                lines.append(f"{term},{obj},{d[obj]!r}")
        return "\n".join(lines) + "\n"

    def save_snapshot(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "IndexStore":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("snapshot is empty")
        header = lines[0].split(",")
        if len(header) != 3:
            raise ValueError(f"bad snapshot header: {lines[0]!r}")
        store = cls(float(header[0]), float(header[1]), float(header[2]))
        for i, line in enumerate(lines[1:], start=2):
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"bad snapshot line {i}: {line!r}")
            term, obj, riv = int(parts[0]), int(parts[1]), float(parts[2])
            if riv < 0:
                raise ValueError(f"negative riv on snapshot line {i}: {line!r}")
            d = store._postings.get(term)
            if d is not None and obj in d:
                raise ValueError(f"duplicate link on snapshot line {i}: {line!r}")
            store._create_link(term, obj, riv)
        return store

    @classmethod
    def load_snapshot(cls, path) -> "IndexStore":
        with open(path, "r", encoding="ascii") as fh:
            return cls.from_text(fh.read())

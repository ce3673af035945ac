"""One query-feedback round: select a list, observe clicks, adjust scores.

The environment state is the index store; an action is a ranked result list
mixing exploit and explore entries; the observation is the set of clicked
objects.  Clicked objects are reinforced under every query term.  A round
with zero clicks penalizes every presented object under every query term
instead (scaled by ``penalty_scale``).  The reward is the net change of the
store's total riv, and the returned signal accounts for it exactly,
including links auto-created at r_init by a first click.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .selection import (
    BetaPolicy,
    MQList,
    OrderingStrategy,
    _sample_excluding,
    accumulate_scores,
    choose_oa_size,
    compose_mq,
    construct_oa,
    order_mq,
)
from .store import IndexStore, ObjectId, TermId

__all__ = [
    "Query",
    "Feedback",
    "RewardSignal",
    "EngineConfig",
    "select_action",
    "apply_feedback",
    "run_episode",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    """A search request: a non-empty tuple of distinct term ids."""

    terms: tuple[TermId, ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("query must contain at least one term")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError(f"query terms must be distinct, got {self.terms}")


@dataclass(frozen=True)
class Feedback:
    """Observed clicks, in presentation order.  Empty means the whole list
    was judged irrelevant."""

    clicked: tuple[ObjectId, ...] = ()


@dataclass
class RewardSignal:
    """Per-pair riv deltas of one round and their sum.

    `total` equals the change of the store's total riv caused by the round.
    `promoted` / `demoted` list the pairs that crossed the threshold upward
    or downward during the round.
    """

    deltas: list[tuple[TermId, ObjectId, float]] = field(default_factory=list)
    total: float = 0.0
    promoted: list[tuple[TermId, ObjectId]] = field(default_factory=list)
    demoted: list[tuple[TermId, ObjectId]] = field(default_factory=list)


@dataclass(frozen=True)
class EngineConfig:
    """Knobs of the selection + learning loop.

    gamma is the usual discount of the sequential-decision formulation; it
    is carried along and surfaced in reports but no component of this
    package consumes it.
    """

    m: int = 10
    beta_policy: BetaPolicy = field(default_factory=lambda: BetaPolicy.fixed(0.5))
    ordering: OrderingStrategy = OrderingStrategy.NON_RANDOM
    weight: float = 1.0
    penalty_scale: float = 1.0
    gamma: float = 0.9

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 0.0 < self.weight <= 1.0:
            raise ValueError(f"weight must lie in (0, 1], got {self.weight}")
        if self.penalty_scale < 0.0:
            raise ValueError(f"penalty_scale must be >= 0, got {self.penalty_scale}")
        if self.penalty_scale * self.weight > 1.0:
            raise ValueError(
                "penalty_scale * weight must not exceed 1 "
                f"(got {self.penalty_scale} * {self.weight})"
            )
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")


def select_action(
    store: IndexStore,
    query: Query,
    cfg: EngineConfig,
    rng: np.random.Generator,
) -> MQList:
    """Build the ranked list for `query`: resolve beta, take the top
    exploit objects, fill with a uniform explore sample, then order.

    A store with fewer than m objects yields a shorter list containing
    everything known (logged).  An empty store yields an empty list.
    """
    population = store.object_count
    m_eff = cfg.m
    if population < cfg.m:
        log.debug(
            "select_action: population %d below list length %d; presenting all",
            population,
            cfg.m,
        )
        m_eff = population
    if m_eff == 0:
        return MQList([], [])
    beta = cfg.beta_policy.resolve(m_eff, rng)
    k = choose_oa_size(beta, m_eff)
    scores = accumulate_scores(store, query.terms)
    oa = construct_oa(store, query.terms, k, scores=scores)
    ob = _sample_excluding(rng, store.objects_sorted(), set(oa), m_eff - k)
    mq = compose_mq(oa, ob)
    if cfg.ordering is OrderingStrategy.NON_RANDOM:
        # construct_oa already emits descending score with ascending-id
        # ties, which is exactly this presentation; re-sorting is a no-op
        return mq
    return order_mq(mq, cfg.ordering, store, query.terms, rng, scores=scores)


def apply_feedback(
    store: IndexStore,
    query: Query,
    presented: MQList,
    fb: Feedback,
    cfg: EngineConfig,
) -> RewardSignal:
    """Translate clicks into score changes.

    Clicks present: every clicked object is reinforced under every query
    term; unclicked entries are untouched.  No clicks: every presented
    object is penalized under every query term with magnitude
    ``penalty_scale * weight * relevance_base`` (absent pairs are skipped,
    not created).  Clicking an object that was not presented is an error.
    """
    presented_set = set(presented.objects)
    for obj in fb.clicked:
        if obj not in presented_set:
            raise ValueError(f"click on object {obj} that was not presented")
    signal = RewardSignal()
    if fb.clicked:
        weight = cfg.weight
        for obj in fb.clicked:
            for term in query.terms:
                _, delta, promoted = store.reinforce(term, obj, weight)
                signal.deltas.append((term, obj, delta))
                signal.total += delta
                if promoted:
                    signal.promoted.append((term, obj))
        return signal
    weight = cfg.penalty_scale * cfg.weight
    if weight == 0.0:
        return signal
    for obj in presented.objects:
        for term in query.terms:
            _, delta, demoted = store.penalize(term, obj, weight)
            if delta != 0.0:
                signal.deltas.append((term, obj, delta))
                signal.total += delta
            if demoted:
                signal.demoted.append((term, obj))
    return signal


ClickModel = Callable[[MQList, Query], "Feedback | None"]


def run_episode(
    store: IndexStore,
    query: Query,
    cfg: EngineConfig,
    click_model: ClickModel,
    rng: np.random.Generator,
) -> tuple[MQList, Feedback | None, RewardSignal]:
    """One full round: select, observe, learn.

    The click model maps (presented list, query) to Feedback; returning
    None skips the learning step entirely and leaves the store unchanged
    (an unobserved presentation).
    """
    presented = select_action(store, query, cfg, rng)
    fb = click_model(presented, query)
    if fb is None or len(presented) == 0:
        return presented, fb, RewardSignal()
    signal = apply_feedback(store, query, presented, fb, cfg)
    return presented, fb, signal

"""Flat key-value experiment config files.

One `key = value` pair per line; `#` starts a comment; blank lines are
ignored.  Values are numbers (plain or simple fractions like `1/15`),
comma-separated lists, or the literal `uniform` for beta.  Unknown or
duplicate keys and malformed lines are rejected with the line number.

Keys (see README for the full schema):

    mode, horizon, sample_interval, seeds
    s0, alpha                                  (abstract)
    lambda, m, beta, ordering, weight, penalty_scale, gamma,
    case_mix, terms_per_query, click_noise,
    truth.terms, truth.objects, truth.degree,
    init_links_per_term, deconstruct.day, deconstruct.objects
                                               (mechanistic)
"""

from __future__ import annotations

from pathlib import Path

from .engine import EngineConfig
from .harness import ExperimentConfig, Mode
from .selection import BetaPolicy, OrderingStrategy
from .usersim import QueryGenerator

__all__ = ["ConfigError", "parse_config", "load_config"]

_KNOWN_KEYS = {
    "mode",
    "horizon",
    "sample_interval",
    "seeds",
    "s0",
    "alpha",
    "lambda",
    "m",
    "beta",
    "ordering",
    "weight",
    "penalty_scale",
    "gamma",
    "case_mix",
    "terms_per_query",
    "click_noise",
    "truth.terms",
    "truth.objects",
    "truth.degree",
    "init_links_per_term",
    "deconstruct.day",
    "deconstruct.objects",
}


class ConfigError(ValueError):
    """Invalid config file; the message names the key or line."""


def _number(text: str, key: str) -> float:
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad numeric value for {key}: {text!r}")
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad numeric value for {key}: {text!r}")


def _integer(text: str, key: str) -> int:
    value = _number(text, key)
    if value != int(value):
        raise ConfigError(f"{key} must be an integer, got {text!r}")
    return int(value)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse config text into an ExperimentConfig (see module docstring)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        raw[key] = value

    def require(key: str) -> str:
        if key not in raw:
            raise ConfigError(f"{source}: missing key {key!r}")
        return raw[key]

    mode = require("mode").lower()
    if mode not in (Mode.ABSTRACT, Mode.MECHANISTIC):
        raise ConfigError(f"{source}: mode must be abstract or mechanistic, got {mode!r}")
    horizon = _number(require("horizon"), "horizon")
    sample_interval = (
        _number(raw["sample_interval"], "sample_interval")
        if "sample_interval" in raw
        else 5.0
    )
    seeds_text = require("seeds")
    try:
        seeds = tuple(int(s.strip()) for s in seeds_text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"{source}: bad seeds list {seeds_text!r}")
    if not seeds:
        raise ConfigError(f"{source}: seeds list is empty")

    kwargs: dict = dict(
        mode=mode,
        horizon=horizon,
        sample_interval=sample_interval,
        seeds=seeds,
    )

    if mode == Mode.ABSTRACT:
        kwargs["s0"] = _integer(require("s0"), "s0")
        kwargs["alpha"] = _number(require("alpha"), "alpha")
        if "lambda" in raw:  # allowed, but abstract trials do not consume it
            kwargs["lam"] = _number(raw["lambda"], "lambda")
    else:
        if "alpha" in raw:
            raise ConfigError(
                f"{source}: mechanistic mode measures alpha; remove the alpha key"
            )
        kwargs["lam"] = _number(require("lambda"), "lambda")
        kwargs["truth_terms"] = _integer(require("truth.terms"), "truth.terms")
        kwargs["truth_objects"] = _integer(require("truth.objects"), "truth.objects")
        kwargs["truth_degree"] = _integer(require("truth.degree"), "truth.degree")
        if "click_noise" in raw:
            kwargs["click_noise"] = _number(raw["click_noise"], "click_noise")
        if "init_links_per_term" in raw:
            kwargs["init_links_per_term"] = _integer(
                raw["init_links_per_term"], "init_links_per_term"
            )
        if "deconstruct.day" in raw:
            kwargs["deconstruct_day"] = _number(raw["deconstruct.day"], "deconstruct.day")
        if "deconstruct.objects" in raw:
            kwargs["deconstruct_objects"] = _integer(
                raw["deconstruct.objects"], "deconstruct.objects"
            )

        engine_kwargs: dict = {}
        if "m" in raw:
            engine_kwargs["m"] = _integer(raw["m"], "m")
        if "beta" in raw:
            if raw["beta"].lower() == "uniform":
                engine_kwargs["beta_policy"] = BetaPolicy.uniform()
            else:
                engine_kwargs["beta_policy"] = BetaPolicy.fixed(_number(raw["beta"], "beta"))
        if "ordering" in raw:
            try:
                engine_kwargs["ordering"] = OrderingStrategy.from_name(raw["ordering"])
            except ValueError as exc:
                raise ConfigError(f"{source}: {exc}")
        if "weight" in raw:
            engine_kwargs["weight"] = _number(raw["weight"], "weight")
        if "penalty_scale" in raw:
            engine_kwargs["penalty_scale"] = _number(raw["penalty_scale"], "penalty_scale")
        if "gamma" in raw:
            engine_kwargs["gamma"] = _number(raw["gamma"], "gamma")
        try:
            kwargs["engine"] = EngineConfig(**engine_kwargs)
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}")

        gen_kwargs: dict = {}
        if "case_mix" in raw:
            parts = [p.strip() for p in raw["case_mix"].split(",")]
            if len(parts) != 3:
                raise ConfigError(
                    f"{source}: case_mix needs three probabilities "
                    "(all_new, all_existing, hybrid)"
                )
            gen_kwargs["case_mix"] = tuple(_number(p, "case_mix") for p in parts)
        if "terms_per_query" in raw:
            parts = [p.strip() for p in raw["terms_per_query"].split(",")]
            if len(parts) != 2:
                raise ConfigError(f"{source}: terms_per_query needs 'lo,hi'")
            gen_kwargs["terms_per_query"] = (
                _integer(parts[0], "terms_per_query"),
                _integer(parts[1], "terms_per_query"),
            )
        try:
            kwargs["generator"] = QueryGenerator(**gen_kwargs)
        except ValueError as exc:
            raise ConfigError(f"{source}: {exc}")

    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    return parse_config(text, source=str(path))

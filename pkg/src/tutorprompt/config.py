"""Runtime configuration.

A single flat text file of ``key = value`` lines (``#`` comments, blank
lines ignored) drives every tunable: path counts, temperatures, retrieval
cutoffs, BM25 parameters, execution limits, and backend selection. The
same keys can be overridden programmatically or from CLI flags.

`fingerprint` hashes exactly the fields that change what a solve run
computes; operational knobs (worker counts, endpoints, secrets) stay out
so that re-running the same experiment from a different machine keeps the
same fingerprint.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields, replace

from .corpus import QTYPES


class ConfigError(ValueError):
    """Bad key, bad value, or an unreadable config file."""


@dataclass(frozen=True)
class Config:
    n_paths: int = 5
    temperature_greedy: float = 0.0
    temperature_sc: float = 0.5
    k_similar: int = 1
    m_candidates: int = 20
    bm25_k1: float = 1.5
    bm25_b: float = 0.75
    n_exemplars: int = 2
    knowledge_top: int = 3
    exec_timeout_s: float = 10.0
    exec_memory_mb: int = 256
    program_qtypes: tuple[str, ...] = ("word",)
    translate_zh: bool = True
    backend: str = "mock"
    model: str = "gpt-4"
    mock_script: str = ""
    runner: str = "harness"
    harness_cmd: str = "python3 -m sandbox_harness"
    stopwords_en: str = ""
    stopwords_zh: str = ""
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    max_workers: int = 4

    def __post_init__(self):
        if self.n_paths < 2:
            raise ConfigError("n_paths must be >= 2")
        for name in ("temperature_greedy", "temperature_sc"):
            t = getattr(self, name)
            if not 0.0 <= t <= 2.0:
                raise ConfigError(f"{name} must be in [0, 2], got {t}")
        if self.k_similar < 0:
            raise ConfigError("k_similar must be >= 0")
        if self.m_candidates < max(self.k_similar, 1):
            raise ConfigError("m_candidates must be >= k_similar and >= 1")
        if self.n_exemplars < 1:
            raise ConfigError("n_exemplars must be >= 1")
        if self.knowledge_top < 0:
            raise ConfigError("knowledge_top must be >= 0")
        if self.exec_timeout_s <= 0:
            raise ConfigError("exec_timeout_s must be positive")
        if self.exec_memory_mb < 16:
            raise ConfigError("exec_memory_mb must be >= 16")
        unknown = set(self.program_qtypes) - set(QTYPES)
        if unknown:
            raise ConfigError(f"program_qtypes contains unknown qtypes: {sorted(unknown)}")
        if self.backend not in ("mock", "live"):
            raise ConfigError(f"backend must be mock or live, got {self.backend!r}")
        if self.runner not in ("none", "harness"):
            raise ConfigError(f"runner must be none or harness, got {self.runner!r}")
        if self.max_workers < 1:
            raise ConfigError("max_workers must be >= 1")


# Fields that alter what a solve run computes, as opposed to how or where
# it runs. fingerprint() covers exactly this set.
SOLVE_FIELDS = frozenset(
    {
        "n_paths",
        "temperature_greedy",
        "temperature_sc",
        "k_similar",
        "m_candidates",
        "bm25_k1",
        "bm25_b",
        "n_exemplars",
        "knowledge_top",
        "exec_timeout_s",
        "exec_memory_mb",
        "program_qtypes",
        "translate_zh",
        "backend",
        "model",
        "mock_script",
        "runner",
        "harness_cmd",
        "stopwords_en",
        "stopwords_zh",
    }
)


def fingerprint(cfg: Config) -> str:
    payload = {
        f.name: list(v) if isinstance(v := getattr(cfg, f.name), tuple) else v
        for f in fields(cfg)
        if f.name in SOLVE_FIELDS
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _convert(name: str, raw: str, default) -> object:
    raw = raw.strip()
    if isinstance(default, bool):
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{name}: expected an integer, got {raw!r}") from None
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{name}: expected a number, got {raw!r}") from None
    if isinstance(default, tuple):
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    return raw


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a raw string mapping."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def apply_overrides(cfg: Config, overrides: dict) -> Config:
    """Apply a {key: raw-or-typed value} mapping on top of ``cfg``."""
    defaults = {f.name: getattr(Config, f.name, None) for f in fields(Config)}
    updates = {}
    for key, value in overrides.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, str):
            value = _convert(key, value, getattr(cfg, key))
        elif isinstance(value, list):
            value = tuple(value)
        updates[key] = value
    try:
        return replace(cfg, **updates)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | None = None, overrides: dict | None = None) -> Config:
    cfg = Config()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        cfg = apply_overrides(cfg, parse_config_text(text))
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def dump_config(cfg: Config) -> str:
    """Render a config back to the file format, one key per line."""
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            value = ",".join(value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"

"""Run configuration: TOML or JSON file, then command-line overrides."""
from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .chainrec import ENCLOSURES, MAX_DEPTH
from .dynamics import CHERRY_CENTER, DEFAULT_STEP
from .errors import ConfigError, DepthTooLarge, InfeasibleSpec
from .knots import KnotSpec, shipped_knot


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs.

    ``knot`` holds overrides for the knot spec (``anchors_deg``,
    ``clearance``, ``tube_radius``, ``smoothing``) or a ``file`` key naming a
    knot JSON document; an empty table means the shipped knot for ``n``.
    """

    n: int = 0
    knot: dict = field(default_factory=dict)
    step: float = DEFAULT_STEP
    depth: int = 5
    R: float = 2.0
    samples_per_axis: int = 3
    padding: float = 1.2
    random_samples: int = 1
    enclosure: str = "hull"
    seed: int = 0
    threads: int | None = None
    out: str = "wildarc-out"
    center: float = CHERRY_CENTER

    def __post_init__(self):
        for name in ("n", "depth", "samples_per_axis", "random_samples", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{name} must be an integer, got {v!r}")
        if self.n < 0:
            raise ConfigError("n must be nonnegative")
        for name in ("step", "R", "padding"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.depth < 1:
            raise ConfigError("depth must be positive")
        if self.depth > MAX_DEPTH:
            raise DepthTooLarge(f"depth {self.depth} exceeds the limit {MAX_DEPTH}")
        if self.samples_per_axis < 2:
            raise ConfigError("samples_per_axis must be at least 2")
        if self.random_samples < 0 or self.seed < 0:
            raise ConfigError("random_samples and seed must be nonnegative")
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise ConfigError("threads must be a positive integer")
        if self.enclosure not in ENCLOSURES:
            raise ConfigError(f"enclosure must be one of {ENCLOSURES}")
        if not isinstance(self.knot, dict):
            raise ConfigError("knot must be a table")
        object.__setattr__(self, "out", str(self.out))

    def knot_spec(self) -> KnotSpec:
        try:
            kn = dict(self.knot)
            if "file" in kn:
                spec = KnotSpec.from_json(Path(kn.pop("file")))
                if spec.n != self.n:
                    raise ConfigError(f"knot file is for n={spec.n}, config says n={self.n}")
                return spec
            if not kn:
                return shipped_knot(self.n)
            kn["n"] = self.n
            return KnotSpec.from_json(kn)
        except (OSError, ValueError) as exc:
            if isinstance(exc, (ConfigError, InfeasibleSpec)):
                raise
            raise ConfigError(f"cannot read knot spec: {exc}") from exc

    def to_json(self) -> dict:
        return asdict(self)


FIELD_NAMES = frozenset(f.name for f in fields(RunConfig))


def read_config_file(path) -> dict[str, Any]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".toml":
            doc = tomllib.loads(raw.decode("utf-8"))
        else:
            doc = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    # a [run] table is accepted as an alias for top-level keys
    if "run" in doc and isinstance(doc["run"], dict):
        doc = {**{k: v for k, v in doc.items() if k != "run"}, **doc["run"]}
    unknown = sorted(set(doc) - FIELD_NAMES)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    return doc


def load_config(path=None, **overrides) -> RunConfig:
    """Defaults, then the file, then non-None ``overrides``."""
    doc: dict[str, Any] = {}
    if path is not None:
        doc.update(read_config_file(path))
    doc.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(doc) - FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown settings {unknown}")
    try:
        return RunConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def with_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})

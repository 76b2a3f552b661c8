"""Pipeline configuration: one key-value file, overridable from the command line.

Example file::

    [authordrift]
    products = dumps/products.jsonl.gz
    relations = dumps/relations.jsonl.gz
    out_dir = out
    window_days = 183
    weights = 0.5, 0.3, 0.2
    tau_days = 90
    k = 2
    threshold = 0.25
    exact_names = false
    simple_only = false
    group_by = year, supplement_kind
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

from authordrift.namematch import DEFAULT_THRESHOLD, MatcherConfig
from authordrift.retrofit import RetrofitConfig

SECTION = "authordrift"


@dataclass(frozen=True)
class PipelineConfig:
    products: Optional[str] = None
    relations: Optional[str] = None
    out_dir: str = "."
    truth: Optional[str] = None
    window_days: int = 183
    weights: Tuple[float, float, float] = (0.5, 0.3, 0.2)
    tau_days: float = 90.0
    k: float = 2.0
    threshold: float = DEFAULT_THRESHOLD
    exact_names: bool = False
    simple_only: bool = False
    jobs: int = 1
    group_by: Tuple[str, ...] = ("year", "supplement_kind")

    @property
    def matcher(self) -> MatcherConfig:
        return MatcherConfig(threshold=self.threshold, exact=self.exact_names)

    @property
    def retrofit(self) -> RetrofitConfig:
        return RetrofitConfig(
            window_days=self.window_days, weights=self.weights, tau_days=self.tau_days, k=self.k
        )

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def override(self, **values) -> "PipelineConfig":
        """Replace fields whose override value is not None."""
        return replace(self, **{k: v for k, v in values.items() if v is not None})


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _names(text: str) -> Tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


_PARSERS = {
    "window_days": int,
    "tau_days": float,
    "k": float,
    "threshold": float,
    "jobs": int,
    "weights": _floats,
    "group_by": _names,
}
_BOOLEAN = {"exact_names", "simple_only"}


def load_config(path: Optional[str]) -> PipelineConfig:
    """Read a config file; relative input paths resolve against the file's directory."""
    if path is None:
        return PipelineConfig()
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = f"[{SECTION}]\n" + text
    parser.read_string(text, source=path)
    if not parser.has_section(SECTION):
        raise ValueError(f"{path}: missing [{SECTION}] section")
    section = parser[SECTION]
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    base = os.path.dirname(os.path.abspath(path))
    values = {}
    for key in section:
        if key in _BOOLEAN:
            values[key] = section.getboolean(key)
        elif key in _PARSERS:
            values[key] = _PARSERS[key](section[key])
        else:
            value = section[key]
            values[key] = value if os.path.isabs(value) else os.path.join(base, value)
    return PipelineConfig(**values)

"""Run configuration and its flat ``key = value`` file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Config:
    k1: float = 1.2
    b: float = 0.75
    theta: float = 0.5
    L: int = 2
    N: int = 300
    N_final: int = 300
    K: int = 20000
    p_sub: float = 0.0
    p_del: float = 0.0
    p_ins: float = 0.0
    p_false_oov: float = 0.0
    seed: int = 0
    epsilon: float = 1e-9
    aggregate: str = "sum"
    selection: str = "phonetic"

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [0, 1]")
        if self.L < 1 or self.N < 1 or self.N_final < 1 or self.K < 1:
            raise ValueError("L, N, N_final and K must be positive")
        if self.aggregate not in ("sum", "mean"):
            raise ValueError("aggregate must be 'sum' or 'mean'")
        if self.selection not in ("phonetic", "score"):
            raise ValueError("selection must be 'phonetic' or 'score'")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())


def parse_config(text: str, base: Config | None = None) -> Config:
    types = {f.name: f.type for f in fields(Config)}
    casts = {"float": float, "int": int, "str": str}
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            changes[key] = casts[types[key]](value)
        except ValueError:
            raise ValueError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return replace(base or Config(), **changes)


def load_config(path: str | Path) -> Config:
    return parse_config(Path(path).read_text(encoding="utf-8"))

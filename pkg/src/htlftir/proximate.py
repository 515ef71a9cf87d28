"""Proximate analysis arithmetic and closure checks (mass % of wet sample)."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass
from decimal import Decimal
from pathlib import Path

from .errors import ConfigError, OverUnity

DEFAULT_TOLERANCE = 0.5
# absorbs binary rounding of decimal inputs so tol=0 accepts exact decimals
_ROUNDING_SLACK = 1e-9

FIELDS = ("mc", "ts", "vs", "ac", "fc")


def fixed_carbon(mc: float, vs: float, ac: float) -> float:
    """Fixed carbon by difference, ``100 - (mc + vs + ac)``.

    Evaluated in decimal arithmetic on the shortest repr of each input, so
    values typed with a few decimals give the exact decimal answer.
    """
    for name, v in (("mc", mc), ("vs", vs), ("ac", ac)):
        if not 0 <= v <= 100:
            raise ValueError(f"{name}={v} outside [0, 100]")
    total = sum(Decimal(repr(float(v))) for v in (mc, vs, ac))
    if total > 100:
        raise OverUnity(f"mc + vs + ac = {total} exceeds 100")
    return float(Decimal(100) - total)


@dataclass(frozen=True)
class ProximateComposition:
    mc: float
    ts: float
    vs: float
    ac: float
    fc: float
    u_mc: float = 0.0
    u_ts: float = 0.0
    u_vs: float = 0.0
    u_ac: float = 0.0
    u_fc: float = 0.0

    def __post_init__(self):
        for name in FIELDS:
            v = getattr(self, name)
            if not 0 <= v <= 100:
                raise ValueError(f"{name}={v} outside [0, 100]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: dict) -> "ProximateComposition":
        """Build from a partial mapping; ``ts`` and ``fc`` are derived when absent."""
        data = {k.lower(): float(v) for k, v in values.items()}
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown proximate key(s): {', '.join(sorted(unknown))}")
        missing = {"mc", "vs", "ac"} - set(data)
        if missing:
            raise ConfigError(f"proximate composition needs {', '.join(sorted(missing))}")
        if "ts" not in data:
            data["ts"] = float(Decimal(100) - Decimal(repr(data["mc"])))
        if "fc" not in data:
            data["fc"] = fixed_carbon(data["mc"], data["vs"], data["ac"])
        return cls(**data)


def validate_composition(p: ProximateComposition, tol: float = DEFAULT_TOLERANCE) -> list[str]:
    """Closure violations of ``p``; an empty list means both identities hold.

    Checks ``mc + ts = 100`` ("ts closure") and ``vs + ac + fc = ts``
    ("fc closure").
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    violations = []
    if abs(p.mc + p.ts - 100.0) > tol + _ROUNDING_SLACK:
        violations.append("ts closure")
    if abs(p.vs + p.ac + p.fc - p.ts) > tol + _ROUNDING_SLACK:
        violations.append("fc closure")
    return violations


_PAIR = re.compile(r"^\s*([A-Za-z_]+)\s*[=:]\s*([-+0-9.eE]+)\s*$")


def parse_composition(text: str) -> ProximateComposition:
    """Parse ``key=value`` pairs separated by commas or newlines.

    ``#`` starts a comment. Keys are the field names, e.g. ``mc=88.7, vs=7.2``.
    """
    values = {}
    for chunk in re.split(r"[,\n;]", text):
        chunk = chunk.split("#", 1)[0]
        if not chunk.strip():
            continue
        m = _PAIR.match(chunk)
        if not m:
            raise ConfigError(f"cannot parse proximate entry {chunk.strip()!r}")
        values[m.group(1)] = float(m.group(2))
    return ProximateComposition.from_mapping(values)


def load_composition(arg: str) -> ProximateComposition:
    """Accept either a path to a key=value file or an inline key=value string."""
    try:
        is_file = Path(arg).is_file()
    except OSError:
        is_file = False
    if is_file:
        return parse_composition(Path(arg).read_text(encoding="utf-8"))
    return parse_composition(arg)

"""Machine-readable reports (JSON, schema version 1)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from typing import Optional

from . import __version__

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


@dataclass
class Report:
    """One CLI run.

    ``bounds`` rows are ``{"name", "lhs", "rhs", "pass"}``; ``lemmas`` rows
    are ``{"name", "passed", "witness", "checked"}``. Every field is plain
    JSON so ``Report.from_json(r.to_json()) == r``.
    """

    command: str
    inputs: dict = field(default_factory=dict)
    conditions: Optional[dict] = None
    sizes: Optional[dict] = None
    spectra: Optional[dict] = None
    bounds: list = field(default_factory=list)
    lemmas: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    mixing_curve: Optional[str] = None
    exit_code: int = EXIT_OK
    message: str = ""
    schema_version: str = SCHEMA_VERSION
    tool_version: str = __version__
    generated_at: Optional[str] = None

    def stamp(self) -> "Report":
        self.generated_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return self

    @property
    def passed(self) -> bool:
        return (all(b["pass"] for b in self.bounds) and all(l["passed"] for l in self.lemmas)
                and (self.conditions is None or self.conditions["passed"]))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def certificate_rows(cert) -> tuple[dict, list, list]:
    return (dict(cert.spectra), [b.to_dict() for b in cert.bounds], [l.to_dict() for l in cert.lemmas])

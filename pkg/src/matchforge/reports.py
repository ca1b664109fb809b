from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class Report:
    """Outcome of a check: pass, or a concrete witness of failure.

    ``status`` refines ``ok`` where a check has more than two outcomes
    (e.g. ``characterized`` / ``not-unique`` / ``incompatible``).
    """

    check: str
    ok: bool
    witness: Optional[dict] = None
    status: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.ok else "fail"

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        out = {"check": self.check, "ok": self.ok, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def line(self, title: str = None) -> str:
        mark = "PASS" if self.ok else "FAIL"
        text = f"{mark}  {title or self.check}"
        if self.status not in ("pass", "fail"):
            text += f"  [{self.status}]"
        if self.witness is not None:
            text += f"  witness={self.witness}"
        return text

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckResult:
    name: str
    ok: bool
    witness: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "ok": self.ok}
        if not self.ok:
            d["witness"] = jsonable(self.witness)
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class Report:
    subject: str
    results: list[CheckResult] = field(default_factory=list)
    arity_bound: int | None = None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def add(self, name: str, witness: Any = None, detail: str = "") -> CheckResult:
        r = CheckResult(name, witness is None, witness, detail)
        self.results.append(r)
        return r

    def get(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.ok]

    def to_json(self) -> dict:
        return {"subject": self.subject, "arity_bound": self.arity_bound, "ok": self.ok,
                "checks": [r.to_json() for r in self.results]}

    def __str__(self) -> str:
        lines = [f"{self.subject} (arity bound {self.arity_bound})"]
        for r in self.results:
            lines.append(f"  {'pass' if r.ok else 'FAIL'}  {r.name}"
                         + ("" if r.ok else f"  witness: {jsonable(r.witness)}"))
        return "\n".join(lines)


def jsonable(x: Any) -> Any:
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return repr(x)

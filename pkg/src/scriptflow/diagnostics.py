"""Diagnostic records shared by the parser, graph builder and validator."""
from __future__ import annotations

from dataclasses import dataclass, field

SEVERITIES = ("error", "warning", "info")
_SEVERITY_RANK = {name: i for i, name in enumerate(SEVERITIES)}

__all__ = ["Diagnostic", "severity_rank", "sort_diagnostics", "diagnostic_to_json", "count_errors"]


@dataclass(frozen=True)
class Diagnostic:
    """One finding about a document or graph.

    `rule` is a stable identifier (validator rules are R1..R7; parser and
    graph-builder notes use word identifiers like "tolerant-comma" or
    "fuzzy-component").  `repair` is an optional machine-applicable fix,
    serialized under the "repair" key.
    """

    rule: str
    severity: str
    message: str
    node: int | None = None
    port: str | None = None
    edge: tuple[tuple[int, str], tuple[int, str]] | None = None
    repair: "object | None" = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.severity not in SEVERITIES:
            raise ValueError(f"severity must be one of {SEVERITIES}, got {self.severity!r}")

    @property
    def is_error(self) -> bool:
        return self.severity == "error"

    def __str__(self) -> str:
        where = ""
        if self.node is not None:
            where = f" [node {self.node}"
            if self.port is not None:
                where += f".{self.port}"
            where += "]"
        return f"{self.rule} {self.severity}{where}: {self.message}"


def severity_rank(diag: Diagnostic) -> int:
    return _SEVERITY_RANK[diag.severity]


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Deterministic order: severity first, then node id, rule, port."""
    return sorted(
        diags,
        key=lambda d: (
            severity_rank(d),
            d.node if d.node is not None else -1,
            d.rule,
            d.port or "",
            d.message,
        ),
    )


def count_errors(diags: list[Diagnostic]) -> int:
    return sum(1 for d in diags if d.is_error)


def diagnostic_to_json(diag: Diagnostic) -> dict:
    """Stable key order; one of these per line is the JSONL diagnostics format."""
    out: dict = {"rule": diag.rule, "severity": diag.severity}
    if diag.node is not None:
        out["node"] = diag.node
    if diag.port is not None:
        out["port"] = diag.port
    if diag.edge is not None:
        (fid, fport), (tid, tport) = diag.edge
        out["edge"] = {"from": {"id": fid, "port": fport}, "to": {"id": tid, "port": tport}}
    out["message"] = diag.message
    if diag.repair is not None:
        out["repair"] = diag.repair.to_json()  # type: ignore[attr-defined]
    return out

"""Deterministic reports: a JSON-compatible tree plus a text rendering.

Nothing time- or host-dependent goes into a report, so identical inputs give
byte-identical output.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__
from .atiyah import (
    Certificate,
    Cocycle,
    NonVanishing,
    OperatorMatrix,
    Unknown,
    Vanishes,
    Verdict,
    format_column,
    format_row,
)
from .clean import CleanUnknown, CleanVerdict, NotClean, RankEquationFailure


@dataclass
class Report:
    command: str
    source: str
    status: str
    exit_code: int
    parameters: dict[str, Any] = field(default_factory=dict)
    payload: dict[str, Any] = field(default_factory=dict)
    # text-mode rows, columns padded to width; the tree still carries the data
    table: Optional[list[list[str]]] = None

    def to_tree(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "source": self.source,
            "status": self.status,
            "exit_code": self.exit_code,
            "engine_version": __version__,
            "parameters": self.parameters,
            **self.payload,
        }

    def render(self, fmt: str = "text") -> str:
        tree = self.to_tree()
        if fmt == "json":
            return json.dumps(tree, indent=2, sort_keys=True, ensure_ascii=False)
        lines = _text_lines(tree, 0)
        if self.table:
            lines = [f"{self.command}: {self.status}", ""] + _table_lines(self.table)
        return "\n".join(lines)


def _table_lines(rows: list[list[str]]) -> list[str]:
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    return ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]


def _text_lines(value: Any, indent: int) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines


def _scalar(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value == {} or value == []:
        return "(empty)"
    return str(value)


def rational(value: Fraction) -> str:
    return str(Fraction(value))


def point(values: Sequence[Fraction]) -> list[str]:
    return [rational(v) for v in values]


def cocycle_tree(cocycle: Cocycle) -> dict[str, str]:
    return {format_row(row): str(value) for row, value in cocycle.rows()}


def certificate_tree(certificate: Certificate) -> dict[str, str]:
    ordered = sorted(certificate.items(), key=lambda item: item[0])
    return {f"{kind}[{format_column(kind, col)}]": str(value) for (kind, col), value in ordered if value}


def matrix_tree(matrix: OperatorMatrix) -> dict[str, Any]:
    return {
        "shape": list(matrix.shape),
        "rows": [format_row(r) for r in matrix.rows],
        "columns": [format_column(matrix.kind, c) for c in matrix.columns],
        "entries": [[str(value) for value in row] for row in matrix.grid()],
    }


def verdict_tree(verdict: Verdict) -> dict[str, Any]:
    tree: dict[str, Any] = {"verdict": verdict.kind.value}
    if isinstance(verdict, Vanishes):
        tree["certificate_degree"] = verdict.degree
        tree["certificate"] = certificate_tree(verdict.certificate)
    elif isinstance(verdict, NonVanishing):
        tree["witness_point"] = point(verdict.witness_point)
        tree["jet_order"] = verdict.jet_order
    elif isinstance(verdict, Unknown):
        tree["degree_bound_tried"] = verdict.degree_bound_tried
        tree["jet_order_tried"] = verdict.jet_order_tried
    return tree


def clean_tree(verdict: CleanVerdict) -> dict[str, Any]:
    tree: dict[str, Any] = {"clean": verdict.kind.value}
    if isinstance(verdict, NotClean):
        tree["witness_point"] = point(verdict.witness_point)
        tree["reason"] = str(verdict.reason)
        reason = verdict.reason
        if isinstance(reason, RankEquationFailure):
            tree["rank_equation"] = {"dim_z": reason.dim_z, "rank_ds": reason.rank_ds, "n": reason.n}
        else:
            tree["claimed_dims"] = list(reason.claimed_dims)
    elif isinstance(verdict, CleanUnknown):
        tree["reason"] = verdict.reason
    return tree

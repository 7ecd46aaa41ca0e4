"""Structured check reports: a tree of pass/fail/attested/unattested/skipped entries."""

from __future__ import annotations

import json

PASS = "pass"
FAIL = "fail"
ATTESTED = "attested"
UNATTESTED = "unattested"
SKIPPED = "skipped"

_MARKERS = {PASS: "✔", FAIL: "✘"}
_OTHER_MARKER = "◌"

_COLORS = {PASS: "\x1b[32m", FAIL: "\x1b[31m", ATTESTED: "\x1b[36m",
           UNATTESTED: "\x1b[33m", SKIPPED: "\x1b[90m"}
_RESET = "\x1b[0m"


class CheckNode:
    """One report entry; parents aggregate the status of their children."""

    __slots__ = ("id", "title", "status", "residual", "witness", "notes", "children")

    def __init__(self, id: str, title: str, status: str | None = None,
                 residual: str | None = None, witness: str | None = None,
                 notes: str | None = None):
        self.id = id
        self.title = title
        self.status = status
        self.residual = residual
        self.witness = witness
        self.notes = notes
        self.children = []

    def add(self, child: "CheckNode") -> "CheckNode":
        self.children.append(child)
        return child

    def leaf(self, id: str, title: str, ok: bool, residual=None, witness=None, notes=None):
        node = CheckNode(id, title, PASS if ok else FAIL,
                         residual=_render(residual), witness=_render(witness), notes=notes)
        self.children.append(node)
        return node

    def skip(self, id: str, title: str, notes=None):
        node = CheckNode(id, title, SKIPPED, notes=notes)
        self.children.append(node)
        return node

    def aggregate(self) -> str:
        """Compute statuses bottom-up; a parent passes iff all non-skipped
        children pass or are attested."""
        if self.children:
            statuses = [c.aggregate() for c in self.children]
            live = [s for s in statuses if s != SKIPPED]
            if any(s == FAIL for s in live):
                self.status = FAIL
            elif any(s == UNATTESTED for s in live):
                self.status = UNATTESTED
            else:
                self.status = PASS
        elif self.status is None:
            self.status = PASS
        return self.status

    def ok(self) -> bool:
        return self.status in (PASS, ATTESTED)

    # -- emission ------------------------------------------------------------

    def to_obj(self):
        obj = {"id": self.id, "title": self.title, "status": self.status}
        if self.residual is not None:
            obj["residual"] = self.residual
        if self.witness is not None:
            obj["witness"] = self.witness
        if self.notes is not None:
            obj["notes"] = self.notes
        obj["children"] = [c.to_obj() for c in self.children]
        return obj

    def to_text(self, color: bool = False, indent: int = 0) -> str:
        marker = _MARKERS.get(self.status, _OTHER_MARKER)
        if color:
            marker = _COLORS.get(self.status, "") + marker + _RESET
        pad = "  " * indent
        line = f"{pad}{marker} {self.id}: {self.title} [{self.status}]"
        extra = []
        if self.residual is not None:
            extra.append(f"{pad}    residual: {self.residual}")
        if self.witness is not None:
            extra.append(f"{pad}    witness: {self.witness}")
        if self.notes is not None:
            extra.append(f"{pad}    notes: {self.notes}")
        lines = [line] + extra
        for c in self.children:
            lines.append(c.to_text(color, indent + 1))
        return "\n".join(lines)


def _render(x):
    if x is None:
        return None
    if isinstance(x, str):
        return x
    return str(x)


def emit_report(root: CheckNode, format: str = "text", color: bool = False) -> bytes:
    root.aggregate()
    if format == "json":
        return json.dumps(root.to_obj(), ensure_ascii=False,
                          separators=(",", ":")).encode("utf-8")
    if format == "text":
        return (root.to_text(color=color) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")

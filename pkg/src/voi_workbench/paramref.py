"""Canonical addresses for single probability or utility entries.

A reference names exactly one number inside a decision model and has a
stable text form used in model files, on the command line, and in the
HTTP API:

    p(Win=yes)
    p(Win=yes | Sus=no, Field=dry, Bonus=yes)
    u(Bet | Win=yes)
    u(Do-not-bet)

Parent assignments are always written in the variable's declared parent
order, so rendering is canonical and ``parse(render(ref)) == ref``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParamRefError

_ASSIGN_RE = re.compile(r"^\s*([^=|,()\s][^=|,()]*?)\s*=\s*([^=|,()\s][^=|,()]*?)\s*$")


def _parse_assignment_list(text: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for part in text.split(","):
        m = _ASSIGN_RE.match(part)
        if m is None:
            raise ParamRefError(f"malformed assignment {part.strip()!r}")
        pairs.append((m.group(1), m.group(2)))
    return tuple(pairs)


def render_assignment(pairs) -> str:
    """Compact `Var=outcome,...` form used as a table-row key."""
    return ",".join(f"{var}={out}" for var, out in pairs)


def parse_assignment(text: str) -> tuple[tuple[str, str], ...]:
    """Parse a `Var=outcome,...` row key. Empty string means no parents."""
    if text.strip() == "":
        return ()
    return _parse_assignment_list(text)


@dataclass(frozen=True)
class ProbabilityRef:
    """Address of one conditional-probability entry: variable, outcome,
    and the full parent assignment (in declared parent order)."""

    variable: str
    outcome: str
    parents: tuple[tuple[str, str], ...] = ()

    def render(self) -> str:
        head = f"{self.variable}={self.outcome}"
        if not self.parents:
            return f"p({head})"
        given = ", ".join(f"{v}={o}" for v, o in self.parents)
        return f"p({head} | {given})"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class UtilityRef:
    """Address of one utility entry: alternative plus the assignment of
    the utility table's relevant variables."""

    alternative: str
    assignment: tuple[tuple[str, str], ...] = ()

    def render(self) -> str:
        if not self.assignment:
            return f"u({self.alternative})"
        given = ", ".join(f"{v}={o}" for v, o in self.assignment)
        return f"u({self.alternative} | {given})"

    def __str__(self) -> str:
        return self.render()


ParamRef = ProbabilityRef | UtilityRef


def parse_ref(text: str) -> ParamRef:
    """Parse the canonical text form of a parameter reference.

    Whitespace around separators is tolerated; rendering always emits the
    canonical spacing.
    """
    s = text.strip()
    m = re.match(r"^([pu])\((.*)\)$", s, re.DOTALL)
    if m is None:
        raise ParamRefError(f"not a parameter reference: {text!r}")
    kind, body = m.group(1), m.group(2)
    if "|" in body:
        head, _, tail = body.partition("|")
        tail = tail.strip()
        if tail == "":
            raise ParamRefError(f"empty conditioning part in {text!r}")
        given = _parse_assignment_list(tail)
    else:
        head, given = body, ()
    head = head.strip()
    if kind == "p":
        hm = _ASSIGN_RE.match(head)
        if hm is None:
            raise ParamRefError(f"malformed target in {text!r}")
        return ProbabilityRef(hm.group(1), hm.group(2), given)
    if "=" in head or head == "":
        raise ParamRefError(f"malformed alternative in {text!r}")
    return UtilityRef(head, given)


def split_ref_list(text: str) -> list[str]:
    """Split a comma-separated list of references, ignoring commas inside
    parentheses (references themselves contain commas)."""
    parts: list[str] = []
    depth = 0
    current: list[str] = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return [p.strip() for p in parts if p.strip()]

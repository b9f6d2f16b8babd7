"""In-memory elicitation sessions.

A session wraps one model plus a monotonically increasing revision
counter. Mutations are serialized per session and each bumps the revision
by exactly one; the snapshot stack makes undo trivial, and the recorded
operation descriptors can replay the whole history from revision zero to
reconstruct the current model (which tests exercise).
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..model import ChanceVariable, DecisionModel


class RevisionConflict(Exception):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"expected revision {expected}, session is at {actual}")


class NothingToUndo(Exception):
    pass


@dataclass
class HistoryEntry:
    revision: int
    operation: str
    params: dict


@dataclass
class Session:
    id: str
    model: DecisionModel
    revision: int = 0
    history: list[HistoryEntry] = field(default_factory=list)
    snapshots: list[DecisionModel] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        if not self.snapshots:
            self.snapshots.append(self.model)

    def read(self) -> tuple[DecisionModel, int]:
        with self.lock:
            return self.model, self.revision

    def mutate(self, operation: str, params: dict, expected_revision: int | None, apply):
        """Run ``apply(model) -> new model`` under the session lock."""
        with self.lock:
            if expected_revision is not None and expected_revision != self.revision:
                raise RevisionConflict(expected_revision, self.revision)
            new_model = apply(self.model)
            self.model = new_model
            self.revision += 1
            self.snapshots.append(new_model)
            self.history.append(HistoryEntry(self.revision, operation, params))
            return self.revision

    def undo(self, expected_revision: int | None) -> int:
        with self.lock:
            if expected_revision is not None and expected_revision != self.revision:
                raise RevisionConflict(expected_revision, self.revision)
            if len(self.snapshots) < 2:
                raise NothingToUndo()
            self.snapshots.pop()
            self.model = self.snapshots[-1]
            self.revision += 1
            self.history.append(HistoryEntry(self.revision, "undo", {}))
            return self.revision

    def replay(self) -> DecisionModel:
        """Re-apply the recorded history to the initial model; the result
        must equal the current model."""
        from ..modelio import annotation_from_dict

        stack = [self.snapshots[0]]
        for entry in self.history:
            if entry.operation == "undo":
                if len(stack) > 1:
                    stack.pop()
            elif entry.operation == "refine":
                p = entry.params
                parents = [
                    ChanceVariable(
                        s["name"],
                        tuple(s["outcomes"]),
                        tuple(s.get("parents", ())),
                        {_key(k): tuple(row[o] for o in s["outcomes"]) for k, row in s["table"].items()},
                    )
                    for s in p["new_parents"]
                ]
                cpt = {_key(k): row for k, row in p["cpt"].items()}
                from ..paramref import parse_ref

                stack.append(stack[-1].refine(parse_ref(p["target"]), parents, cpt))
            elif entry.operation == "annotate":
                ann = annotation_from_dict(entry.params["annotation"])
                base = stack[-1]
                kept = tuple(a for a in base.annotations if a.target != ann.target)
                from dataclasses import replace

                stack.append(replace(base, annotations=kept + (ann,)))
            else:
                raise ValueError(f"unknown history operation {entry.operation!r}")
        return stack[-1]


def _key(text: str) -> tuple[str, ...]:
    from ..paramref import parse_assignment

    return tuple(o for _, o in parse_assignment(text))


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, model: DecisionModel) -> Session:
        session = Session(id=uuid.uuid4().hex[:12], model=model)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

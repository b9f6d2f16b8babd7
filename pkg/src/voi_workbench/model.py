"""Discrete single-decision models.

A model is a set of chance variables with conditional probability tables
forming a DAG, one decision variable, and a utility table over the
alternatives and a declared subset of chance variables. Models are
immutable values: every editing operation returns a new model, so a model
can be evaluated from many threads at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .confidence import SecondOrderAnnotation
from .errors import (
    ModelValidationError,
    ParamRefError,
    RefineError,
    SubstitutionError,
    UnresolvedRefError,
)
from .paramref import ParamRef, ProbabilityRef, UtilityRef, render_assignment

ROW_SUM_TOL = 1e-9
NORMALIZE_TOL = 1e-6
TIE_TOL = 1e-9


def _normalize_row(probs) -> tuple[float, ...]:
    probs = tuple(float(p) for p in probs)
    total = sum(probs)
    if abs(total - 1.0) <= NORMALIZE_TOL and total > 0.0:
        return tuple(p / total for p in probs)
    return probs


@dataclass(frozen=True)
class ChanceVariable:
    """A discrete chance variable with one distribution row per full
    assignment of its parents. Rows whose sum is within 1e-6 of one are
    renormalized on construction; anything worse is left for validate()
    to report."""

    name: str
    outcomes: tuple[str, ...]
    parents: tuple[str, ...] = ()
    table: dict[tuple[str, ...], tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        outcomes = tuple(str(o) for o in self.outcomes)
        if len(outcomes) < 2:
            raise ValueError(f"variable {self.name!r} needs at least two outcomes")
        if len(set(outcomes)) != len(outcomes):
            raise ValueError(f"variable {self.name!r} has duplicate outcome labels")
        parents = tuple(str(p) for p in self.parents)
        if len(set(parents)) != len(parents):
            raise ValueError(f"variable {self.name!r} lists a parent twice")
        table = {
            tuple(str(o) for o in key): _normalize_row(row)
            for key, row in self.table.items()
        }
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "table", table)

    def outcome_index(self, label: str) -> int:
        try:
            return self.outcomes.index(label)
        except ValueError:
            raise UnresolvedRefError(
                f"variable {self.name!r} has no outcome {label!r}"
            ) from None

    def row(self, parent_outcomes: tuple[str, ...]) -> tuple[float, ...]:
        try:
            return self.table[tuple(parent_outcomes)]
        except KeyError:
            raise UnresolvedRefError(
                f"variable {self.name!r} has no row for parent assignment "
                f"{render_assignment(zip(self.parents, parent_outcomes)) or '(none)'}"
            ) from None


@dataclass(frozen=True)
class DecisionVariable:
    name: str
    alternatives: tuple[str, ...]

    def __post_init__(self):
        alts = tuple(str(a) for a in self.alternatives)
        if not alts:
            raise ValueError("decision variable needs at least one alternative")
        if any(not a for a in alts):
            raise ValueError("alternative labels must be nonempty")
        if len(set(alts)) != len(alts):
            raise ValueError("alternative labels must be unique")
        object.__setattr__(self, "alternatives", alts)


@dataclass(frozen=True)
class UtilityTable:
    """Utility of each alternative for each assignment of the declared
    relevant variables; everything else is utility-irrelevant."""

    relevant_vars: tuple[str, ...]
    entries: dict[tuple[str, tuple[str, ...]], float]

    def __post_init__(self):
        rel = tuple(str(v) for v in self.relevant_vars)
        entries = {
            (str(alt), tuple(str(o) for o in key)): float(u)
            for (alt, key), u in self.entries.items()
        }
        object.__setattr__(self, "relevant_vars", rel)
        object.__setattr__(self, "entries", entries)

    def value(self, alternative: str, assignment: tuple[str, ...]) -> float:
        try:
            return self.entries[(alternative, assignment)]
        except KeyError:
            raise UnresolvedRefError(
                f"no utility entry for alternative {alternative!r} and "
                f"assignment {render_assignment(zip(self.relevant_vars, assignment)) or '(none)'}"
            ) from None


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    ref: str | None = None

    def __str__(self) -> str:
        where = f" [{self.ref}]" if self.ref else ""
        return f"{self.code}: {self.message}{where}"


@dataclass(frozen=True)
class OptimalChoice:
    alternative: str
    expected_utility: float
    tie: bool


@dataclass(frozen=True)
class DecisionModel:
    chance: tuple[ChanceVariable, ...]
    decision: DecisionVariable
    utility: UtilityTable
    annotations: tuple[SecondOrderAnnotation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "chance", tuple(self.chance))
        object.__setattr__(self, "annotations", tuple(self.annotations))

    # -- lookups ---------------------------------------------------------

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.chance)

    def variable(self, name: str) -> ChanceVariable:
        for v in self.chance:
            if v.name == name:
                return v
        raise UnresolvedRefError(f"no chance variable named {name!r}")

    def annotation_for(self, ref: ParamRef) -> SecondOrderAnnotation | None:
        for ann in self.annotations:
            if ann.target == ref:
                return ann
        return None

    # -- validation ------------------------------------------------------

    def validate(self) -> list[Diagnostic]:
        """Check every structural invariant, returning one diagnostic per
        problem. An empty list means the model is sound."""
        cached = getattr(self, "_diagnostics", None)
        if cached is not None:
            return list(cached)
        diags: list[Diagnostic] = []
        names = [v.name for v in self.chance] + [self.decision.name]
        seen = set()
        for n in names:
            if n in seen:
                diags.append(Diagnostic("duplicate-name", f"name {n!r} used more than once", n))
            seen.add(n)
        chance_names = {v.name for v in self.chance}

        structural = False
        for v in self.chance:
            for p in v.parents:
                if p not in chance_names:
                    diags.append(
                        Diagnostic("unknown-parent", f"{v.name!r} lists unknown parent {p!r}", v.name)
                    )
                    structural = True
        if not structural:
            cycle = self._find_cycle()
            if cycle:
                diags.append(
                    Diagnostic(
                        "cycle",
                        "conditioning structure is cyclic through " + " -> ".join(cycle),
                        cycle[0],
                    )
                )
                structural = True

        rows_ok = True
        for v in self.chance:
            if any(p not in chance_names for p in v.parents):
                rows_ok = False
                continue
            expected = set(
                itertools.product(*(self.variable(p).outcomes for p in v.parents))
            )
            present = set(v.table.keys())
            for key in sorted(expected - present):
                diags.append(
                    Diagnostic(
                        "missing-row",
                        f"{v.name!r} has no row for "
                        f"{render_assignment(zip(v.parents, key)) or '(none)'}",
                        v.name,
                    )
                )
                rows_ok = False
            for key in sorted(present - expected):
                diags.append(
                    Diagnostic(
                        "extra-row",
                        f"{v.name!r} has a row for impossible assignment {key!r}",
                        v.name,
                    )
                )
                rows_ok = False
            for key in sorted(present & expected):
                row = v.table[key]
                ref = ProbabilityRef(v.name, v.outcomes[0], tuple(zip(v.parents, key)))
                if len(row) != len(v.outcomes):
                    diags.append(
                        Diagnostic(
                            "bad-row",
                            f"row has {len(row)} entries for {len(v.outcomes)} outcomes",
                            ref.render(),
                        )
                    )
                    rows_ok = False
                    continue
                if any(p < 0.0 or p > 1.0 for p in row):
                    diags.append(
                        Diagnostic("bad-probability", f"row {row} has entries outside [0, 1]", ref.render())
                    )
                    rows_ok = False
                if abs(sum(row) - 1.0) > ROW_SUM_TOL:
                    diags.append(
                        Diagnostic(
                            "row-not-normalized",
                            f"row sums to {sum(row):.9g}, not 1",
                            ref.render(),
                        )
                    )
                    rows_ok = False

        for rv in self.utility.relevant_vars:
            if rv not in chance_names:
                diags.append(
                    Diagnostic("unknown-utility-var", f"utility table names unknown variable {rv!r}", rv)
                )
                structural = True
        if not structural:
            expected_u = {
                (alt, combo)
                for alt in self.decision.alternatives
                for combo in itertools.product(
                    *(self.variable(rv).outcomes for rv in self.utility.relevant_vars)
                )
            }
            present_u = set(self.utility.entries.keys())
            for alt, combo in sorted(expected_u - present_u):
                diags.append(
                    Diagnostic(
                        "utility-missing",
                        "no utility entry",
                        UtilityRef(alt, tuple(zip(self.utility.relevant_vars, combo))).render(),
                    )
                )
            for alt, combo in sorted(present_u - expected_u):
                diags.append(
                    Diagnostic(
                        "utility-extra",
                        "utility entry addresses nothing in the model",
                        f"u({alt} | {render_assignment(zip(self.utility.relevant_vars, combo))})",
                    )
                )

        if not structural and rows_ok:
            total = 0.0
            for _, p in self._iter_joint():
                total += p
            if abs(total - 1.0) > ROW_SUM_TOL:
                diags.append(
                    Diagnostic("joint-not-normalized", f"joint probabilities sum to {total:.12g}", None)
                )
            seen_targets = set()
            for ann in self.annotations:
                try:
                    self.point_value(ann.target)
                except ParamRefError as exc:
                    diags.append(Diagnostic("annotation-unresolved", str(exc), ann.target.render()))
                    continue
                if ann.target in seen_targets:
                    diags.append(
                        Diagnostic("annotation-duplicate", "parameter annotated twice", ann.target.render())
                    )
                seen_targets.add(ann.target)

        object.__setattr__(self, "_diagnostics", tuple(diags))
        return diags

    def assert_valid(self) -> None:
        diags = self.validate()
        if diags:
            raise ModelValidationError(diags)

    def _find_cycle(self) -> list[str] | None:
        color: dict[str, int] = {}
        stack: list[str] = []

        def visit(name: str) -> list[str] | None:
            color[name] = 1
            stack.append(name)
            for p in self.variable(name).parents:
                state = color.get(p, 0)
                if state == 1:
                    return stack[stack.index(p):] + [p]
                if state == 0:
                    found = visit(p)
                    if found:
                        return found
            stack.pop()
            color[name] = 2
            return None

        for v in self.chance:
            if color.get(v.name, 0) == 0:
                found = visit(v.name)
                if found:
                    return found
        return None

    # -- evaluation ------------------------------------------------------

    def _iter_joint(self):
        """Yield (outcome-index tuple, probability) over all full
        assignments, variables in declared order, rightmost fastest."""
        vars_ = self.chance
        positions = {v.name: i for i, v in enumerate(vars_)}
        parent_pos = [tuple(positions[p] for p in v.parents) for v in vars_]
        for combo in itertools.product(*(range(len(v.outcomes)) for v in vars_)):
            p = 1.0
            for i, v in enumerate(vars_):
                key = tuple(vars_[j].outcomes[combo[j]] for j in parent_pos[i])
                p *= v.table[key][combo[i]]
            yield combo, p

    def evaluate_joint(self):
        """Iterate (assignment dict, probability) over every full chance
        assignment; probabilities are products of table rows and sum to 1."""
        self.assert_valid()
        for combo, p in self._iter_joint():
            yield (
                {v.name: v.outcomes[combo[i]] for i, v in enumerate(self.chance)},
                p,
            )

    def marginal(self, variable: str, outcome: str) -> float:
        self.assert_valid()
        var = self.variable(variable)
        idx = var.outcome_index(outcome)
        pos = self.variable_names.index(variable)
        return sum(p for combo, p in self._iter_joint() if combo[pos] == idx)

    def expected_utility(self, alternative: str) -> float:
        self.assert_valid()
        if alternative not in self.decision.alternatives:
            raise UnresolvedRefError(f"no alternative named {alternative!r}")
        rel_pos = [self.variable_names.index(rv) for rv in self.utility.relevant_vars]
        total = 0.0
        for combo, p in self._iter_joint():
            proj = tuple(self.chance[i].outcomes[combo[i]] for i in rel_pos)
            total += p * self.utility.value(alternative, proj)
        return total

    def optimal_alternative(self) -> OptimalChoice:
        """Best alternative by expected utility; ties go to the earliest
        declared alternative, with the tie flagged."""
        eus = [(alt, self.expected_utility(alt)) for alt in self.decision.alternatives]
        best_alt, best_eu = max(eus, key=lambda pair: pair[1])
        for alt, eu in eus:
            if eu >= best_eu - TIE_TOL:
                chosen, chosen_eu = alt, eu
                break
        tie = sum(1 for _, eu in eus if eu >= best_eu - TIE_TOL) > 1
        return OptimalChoice(chosen, chosen_eu, tie)

    # -- parameter addressing --------------------------------------------

    def point_value(self, ref: ParamRef) -> float:
        """Resolve a reference to the single number it addresses."""
        if isinstance(ref, ProbabilityRef):
            var = self.variable(ref.variable)
            self._check_parent_order(var, ref)
            idx = var.outcome_index(ref.outcome)
            return var.row(tuple(o for _, o in ref.parents))[idx]
        if isinstance(ref, UtilityRef):
            if ref.alternative not in self.decision.alternatives:
                raise UnresolvedRefError(f"no alternative named {ref.alternative!r}")
            given = tuple(v for v, _ in ref.assignment)
            if given != self.utility.relevant_vars:
                raise UnresolvedRefError(
                    f"utility entries are addressed by ({', '.join(self.utility.relevant_vars) or 'no variables'}) "
                    f"in that order, got ({', '.join(given) or 'none'})"
                )
            return self.utility.value(ref.alternative, tuple(o for _, o in ref.assignment))
        raise ParamRefError(f"not a parameter reference: {ref!r}")

    def _check_parent_order(self, var: ChanceVariable, ref: ProbabilityRef) -> None:
        given = tuple(v for v, _ in ref.parents)
        if given != var.parents:
            raise UnresolvedRefError(
                f"{ref} does not match {var.name!r}, whose parents are "
                f"({', '.join(var.parents) or 'none'}) in that order"
            )
        for (pname, out) in ref.parents:
            self.variable(pname).outcome_index(out)

    def substitute(self, ref: ParamRef, value: float) -> "DecisionModel":
        """Return a new model with one entry replaced.

        Probability substitution rescales the sibling outcomes of the row
        so it still sums to one: each sibling keeps its share of the
        remaining mass. If the substituted outcome held all the mass, the
        remainder is spread uniformly.
        """
        value = float(value)
        if isinstance(ref, ProbabilityRef):
            if not 0.0 <= value <= 1.0:
                raise SubstitutionError(f"probability {value} outside [0, 1] for {ref}")
            var = self.variable(ref.variable)
            self._check_parent_order(var, ref)
            idx = var.outcome_index(ref.outcome)
            key = tuple(o for _, o in ref.parents)
            row = var.row(key)
            new_row = substituted_row(row, idx, value)
            table = dict(var.table)
            table[key] = new_row
            new_var = replace(var, table=table)
            return replace(
                self,
                chance=tuple(new_var if v.name == var.name else v for v in self.chance),
            )
        if isinstance(ref, UtilityRef):
            self.point_value(ref)  # existence check
            entries = dict(self.utility.entries)
            entries[(ref.alternative, tuple(o for _, o in ref.assignment))] = value
            return replace(self, utility=replace(self.utility, entries=entries))
        raise ParamRefError(f"not a parameter reference: {ref!r}")

    # -- refinement ------------------------------------------------------

    def refine(self, target, new_parents, cpt) -> "DecisionModel":
        """Replace a directly assessed (parentless) probability variable
        with one conditioned on the given parent variables.

        ``cpt`` maps each full assignment of the new parents (tuple of
        outcome labels, in the order the parents are given) to a
        distribution over the target's outcomes. Parents may be variables
        already in the model (passed by identical definition) or new ones,
        which are added along with their own tables. Annotations pinned to
        the target's old unconditioned entries no longer address anything
        and are dropped.
        """
        if isinstance(target, ProbabilityRef):
            target_name = target.variable
            if target.parents:
                raise RefineError(f"refine target must be unconditioned, got {target}")
        elif isinstance(target, str):
            target_name = target
        else:
            raise RefineError(f"refine target must be a variable or probability reference")
        var = self.variable(target_name)
        if var.parents:
            raise RefineError(f"variable {target_name!r} is already conditioned")

        existing = {v.name: v for v in self.chance}
        added: list[ChanceVariable] = []
        parent_names: list[str] = []
        for np_ in new_parents:
            if not isinstance(np_, ChanceVariable):
                raise RefineError("new parents must be chance variables")
            if np_.name == target_name or np_.name == self.decision.name:
                raise RefineError(f"parent name {np_.name!r} clashes with an existing variable")
            if np_.name in parent_names:
                raise RefineError(f"parent {np_.name!r} given twice")
            if np_.name in existing:
                if existing[np_.name] != np_:
                    raise RefineError(
                        f"parent {np_.name!r} clashes with an existing variable of the same name"
                    )
            else:
                added.append(np_)
            parent_names.append(np_.name)
        if not parent_names:
            raise RefineError("refine needs at least one conditioning variable")

        parent_outcomes = []
        for name in parent_names:
            v = existing.get(name) or next(a for a in added if a.name == name)
            parent_outcomes.append(v.outcomes)
        expected_keys = set(itertools.product(*parent_outcomes))
        table: dict[tuple[str, ...], tuple[float, ...]] = {}
        for key, row in cpt.items():
            key = tuple(str(o) for o in key)
            if key not in expected_keys:
                raise RefineError(f"table row {key!r} matches no assignment of {parent_names}")
            table[key] = _coerce_row(row, var.outcomes)
        missing = expected_keys - set(table)
        if missing:
            raise RefineError(
                f"table is missing rows for {sorted(missing)[:3]}"
                + ("..." if len(missing) > 3 else "")
            )

        new_var = ChanceVariable(var.name, var.outcomes, tuple(parent_names), table)
        chance = tuple(new_var if v.name == var.name else v for v in self.chance) + tuple(added)
        kept_annotations = []
        for ann in self.annotations:
            if isinstance(ann.target, ProbabilityRef) and ann.target.variable == var.name:
                continue
            kept_annotations.append(ann)
        candidate = replace(self, chance=chance, annotations=tuple(kept_annotations))
        diags = candidate.validate()
        if diags:
            raise RefineError("refinement produces an invalid model: " + "; ".join(map(str, diags)))
        return candidate


def substituted_row(row: tuple[float, ...], idx: int, value: float) -> tuple[float, ...]:
    """One row with ``row[idx] = value`` and siblings rescaled to keep the
    row summing to one."""
    current = row[idx]
    rest = 1.0 - current
    if rest > 0.0:
        scale = (1.0 - value) / rest
        new_row = tuple(
            value if i == idx else p * scale for i, p in enumerate(row)
        )
    else:
        share = (1.0 - value) / (len(row) - 1)
        new_row = tuple(value if i == idx else share for i, p in enumerate(row))
    return new_row


def _coerce_row(row, outcomes: tuple[str, ...]) -> tuple[float, ...]:
    if isinstance(row, dict):
        missing = [o for o in outcomes if o not in row]
        if missing:
            raise RefineError(f"row {row!r} missing outcomes {missing}")
        extra = [o for o in row if o not in outcomes]
        if extra:
            raise RefineError(f"row {row!r} has unknown outcomes {extra}")
        return tuple(float(row[o]) for o in outcomes)
    row = tuple(float(p) for p in row)
    if len(row) != len(outcomes):
        raise RefineError(f"row {row!r} has {len(row)} entries for {len(outcomes)} outcomes")
    return row

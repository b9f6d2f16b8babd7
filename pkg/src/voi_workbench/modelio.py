"""Reading and writing the model file format.

A model file is UTF-8 JSON with top-level keys ``chance``, ``decision``,
``utility``, and ``annotations``. Table rows are keyed by compact
assignment strings (``"Sus=no,Field=dry,Bonus=yes"``, parents in declared
order; ``""`` for no parents) and utility entries by
``"<alternative>|<assignment>"``. Annotation distributions store their
fitted parameters; when the raw elicitation (fractiles or sketch points)
is present as well, the fit is recomputed on load and must agree with the
stored parameters, so a hand-edited file cannot drift silently.
"""

from __future__ import annotations

import json
from pathlib import Path

from .confidence import (
    BetaDistribution,
    Degenerate,
    FractilePair,
    PiecewiseLinearCdf,
    SecondOrderAnnotation,
    SecondOrderDistribution,
    fit_beta_from_fractiles,
    fit_sketch,
)
from .errors import ModelFileError, ParamRefError
from .model import ChanceVariable, DecisionModel, DecisionVariable, UtilityTable
from .paramref import parse_assignment, parse_ref, render_assignment

REFIT_TOL = 1e-6


def load_model(path) -> DecisionModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return model_from_dict(data)
    except ModelFileError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc


def save_model(model: DecisionModel, path) -> None:
    path = Path(path)
    path.write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def model_from_dict(data) -> DecisionModel:
    if not isinstance(data, dict):
        raise ModelFileError("model document must be a JSON object")
    try:
        chance_specs = data["chance"]
        decision_spec = data["decision"]
        utility_spec = data["utility"]
    except KeyError as exc:
        raise ModelFileError(f"missing top-level key {exc.args[0]!r}") from exc

    chance = tuple(_chance_from_dict(spec) for spec in chance_specs)
    try:
        decision = DecisionVariable(
            str(decision_spec["name"]), tuple(decision_spec["alternatives"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"bad decision variable: {exc}") from exc

    try:
        rel = tuple(str(v) for v in utility_spec.get("relevant_vars", ()))
        entries = {}
        for key, value in utility_spec["entries"].items():
            alt, _, assign_text = key.partition("|")
            assignment = parse_assignment(assign_text)
            given = tuple(v for v, _ in assignment)
            if given != rel:
                raise ModelFileError(
                    f"utility key {key!r} must list {rel or '(no variables)'} in order"
                )
            entries[(alt.strip(), tuple(o for _, o in assignment))] = float(value)
        utility = UtilityTable(rel, entries)
    except (KeyError, TypeError, ValueError, ParamRefError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"bad utility table: {exc}") from exc

    annotations = tuple(
        annotation_from_dict(spec) for spec in data.get("annotations", ())
    )
    return DecisionModel(chance, decision, utility, annotations)


def _chance_from_dict(spec) -> ChanceVariable:
    try:
        name = str(spec["name"])
        outcomes = tuple(str(o) for o in spec["outcomes"])
        parents = tuple(str(p) for p in spec.get("parents", ()))
        table = {}
        for key, row in spec["table"].items():
            assignment = parse_assignment(key)
            given = tuple(v for v, _ in assignment)
            if given != parents:
                raise ModelFileError(
                    f"table key {key!r} of {name!r} must list parents "
                    f"{parents or '(none)'} in order"
                )
            table[tuple(o for _, o in assignment)] = _row_from_spec(row, outcomes, name)
        return ChanceVariable(name, outcomes, parents, table)
    except (KeyError, TypeError, ValueError, ParamRefError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"bad chance variable: {exc}") from exc


def _row_from_spec(row, outcomes, name) -> tuple[float, ...]:
    if isinstance(row, dict):
        unknown = [o for o in row if o not in outcomes]
        if unknown:
            raise ModelFileError(f"{name!r} row names unknown outcomes {unknown}")
        missing = [o for o in outcomes if o not in row]
        if missing:
            raise ModelFileError(f"{name!r} row is missing outcomes {missing}")
        return tuple(float(row[o]) for o in outcomes)
    return tuple(float(p) for p in row)


def model_to_dict(model: DecisionModel) -> dict:
    return {
        "chance": [
            {
                "name": v.name,
                "outcomes": list(v.outcomes),
                "parents": list(v.parents),
                "table": {
                    render_assignment(zip(v.parents, key)): dict(zip(v.outcomes, row))
                    for key, row in sorted(v.table.items())
                },
            }
            for v in model.chance
        ],
        "decision": {
            "name": model.decision.name,
            "alternatives": list(model.decision.alternatives),
        },
        "utility": {
            "relevant_vars": list(model.utility.relevant_vars),
            "entries": {
                _utility_key(model, alt, combo): u
                for (alt, combo), u in sorted(model.utility.entries.items())
            },
        },
        "annotations": [annotation_to_dict(a) for a in model.annotations],
    }


def _utility_key(model: DecisionModel, alt: str, combo: tuple[str, ...]) -> str:
    if not combo:
        return alt
    return f"{alt}|{render_assignment(zip(model.utility.relevant_vars, combo))}"


def annotation_from_dict(spec) -> SecondOrderAnnotation:
    try:
        target = parse_ref(spec["target"])
        scenario = str(spec["scenario"])
        cost = float(spec["cost"])
        dist_spec = spec["distribution"]
    except (KeyError, TypeError, ValueError, ParamRefError) as exc:
        raise ModelFileError(f"bad annotation: {exc}") from exc
    distribution, fractiles = distribution_from_dict(dist_spec)
    try:
        return SecondOrderAnnotation(target, scenario, distribution, cost, fractiles)
    except ValueError as exc:
        raise ModelFileError(f"bad annotation for {target}: {exc}") from exc


def distribution_from_dict(spec) -> tuple[SecondOrderDistribution, FractilePair | None]:
    try:
        family = spec["family"]
    except (KeyError, TypeError) as exc:
        raise ModelFileError("distribution needs a 'family'") from exc
    support = tuple(spec.get("support") or (0.0, 1.0))
    try:
        if family == "beta":
            fractiles = None
            if spec.get("fractiles"):
                fractiles = FractilePair(
                    tuple((f["p"], f["q"]) for f in spec["fractiles"])
                )
                fitted = fit_beta_from_fractiles(fractiles, support)
                if "alpha" in spec or "beta" in spec:
                    stored = (float(spec["alpha"]), float(spec["beta"]))
                    drift = max(
                        abs(stored[0] - fitted.alpha), abs(stored[1] - fitted.beta)
                    )
                    if drift > REFIT_TOL * max(1.0, abs(fitted.alpha), abs(fitted.beta)):
                        raise ModelFileError(
                            f"stored beta parameters {stored} disagree with the "
                            f"refit ({fitted.alpha:.9g}, {fitted.beta:.9g}) of the "
                            f"stored fractiles"
                        )
                return fitted, fractiles
            return (
                BetaDistribution(float(spec["alpha"]), float(spec["beta"]), support),
                None,
            )
        if family == "sketch":
            if spec.get("points"):
                fitted = fit_sketch([tuple(pt) for pt in spec["points"]])
                if spec.get("cdf"):
                    stored = tuple((float(x), float(c)) for x, c in spec["cdf"])
                    if len(stored) != len(fitted.points) or any(
                        abs(a - b) > REFIT_TOL
                        for pa, pb in zip(stored, fitted.points)
                        for a, b in zip(pa, pb)
                    ):
                        raise ModelFileError(
                            "stored sketch cdf disagrees with the refit of the stored points"
                        )
                return fitted, None
            return (
                PiecewiseLinearCdf(tuple((float(x), float(c)) for x, c in spec["cdf"])),
                None,
            )
        if family == "degenerate":
            return Degenerate(float(spec["value"])), None
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"bad {family} distribution: {exc}") from exc
    raise ModelFileError(f"unknown distribution family {family!r}")


def distribution_to_dict(
    dist: SecondOrderDistribution, fractiles: FractilePair | None = None
) -> dict:
    if isinstance(dist, BetaDistribution):
        out = {"family": "beta", "alpha": dist.alpha, "beta": dist.beta}
        if dist.support != (0.0, 1.0):
            out["support"] = list(dist.support)
        if fractiles is not None:
            out["fractiles"] = [{"p": p, "q": q} for p, q in fractiles.pairs]
        return out
    if isinstance(dist, PiecewiseLinearCdf):
        return {"family": "sketch", "cdf": [[x, c] for x, c in dist.points]}
    if isinstance(dist, Degenerate):
        return {"family": "degenerate", "value": dist.value}
    raise ModelFileError(f"unknown distribution type {type(dist).__name__}")


def annotation_to_dict(ann: SecondOrderAnnotation) -> dict:
    return {
        "target": ann.target.render(),
        "scenario": ann.scenario,
        "cost": ann.cost_mean,
        "distribution": distribution_to_dict(ann.distribution, ann.fractiles),
    }

"""Value-of-information analysis.

Two flavors are computed here. Observational VPI asks what perfectly
observing a set of chance variables before deciding is worth, by exact
enumeration. Meta-VPI asks what carrying out the assessment scenarios
attached to a cluster of parameters is worth: the annotated second-order
distributions are sampled jointly (independently per parameter), each
draw is substituted into the model, and the mean per-draw regret of
sticking with the baseline alternative is the estimate. Refinement is
recommended exactly when that value exceeds the summed assessment costs.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnotationError, SubstitutionError, UnresolvedRefError
from .model import DecisionModel, substituted_row
from .paramref import ParamRef, ProbabilityRef, UtilityRef, parse_ref, render_assignment

DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0
MIN_SAMPLES = 100

# The no-information alternative is chosen with every annotated parameter
# at its second-order mean, which is what the annotations say the current
# best guess is. Any gap to the stored point value is a coherence issue,
# surfaced separately.
BASELINE_CONVENTION = "second-order-mean"


@dataclass(frozen=True)
class OutcomeRow:
    outcome: tuple[tuple[str, str], ...]
    probability: float
    best_alternative: str
    conditional_eu: float


@dataclass(frozen=True)
class ObservationalVpiReport:
    observed: tuple[str, ...]
    eu_with_info: float
    eu_baseline: float
    vpi: float
    rows: tuple[OutcomeRow, ...]

    def to_dict(self) -> dict:
        return {
            "observed": list(self.observed),
            "eu_with_info": self.eu_with_info,
            "eu_baseline": self.eu_baseline,
            "vpi": self.vpi,
            "table": [
                {
                    "outcome": render_assignment(row.outcome),
                    "probability": row.probability,
                    "best_alternative": row.best_alternative,
                    "conditional_eu": row.conditional_eu,
                }
                for row in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["outcome", "probability", "best_alternative", "conditional_eu"])
        for row in self.rows:
            writer.writerow(
                [
                    render_assignment(row.outcome),
                    repr(row.probability),
                    row.best_alternative,
                    repr(row.conditional_eu),
                ]
            )
        return buf.getvalue()


@dataclass(frozen=True)
class FocusReport:
    cluster: tuple[ParamRef, ...]
    vpi_estimate: float
    vpi_std_error: float
    total_cost: float
    recommend: bool
    samples: int
    seed: int
    baseline_alternative: str
    baseline_convention: str = BASELINE_CONVENTION

    @property
    def net_value(self) -> float:
        return self.vpi_estimate - self.total_cost

    def to_dict(self) -> dict:
        return {
            "cluster": [ref.render() for ref in self.cluster],
            "vpi_estimate": self.vpi_estimate,
            "vpi_std_error": self.vpi_std_error,
            "total_cost": self.total_cost,
            "recommend": self.recommend,
            "samples": self.samples,
            "seed": self.seed,
            "baseline_alternative": self.baseline_alternative,
            "baseline_convention": self.baseline_convention,
        }


def observational_vpi(model: DecisionModel, observed) -> ObservationalVpiReport:
    """Value of observing ``observed`` perfectly before deciding.

    For each joint outcome of the observed variables the best alternative
    is chosen conditionally; the probability-weighted best conditional
    expected utilities are compared against deciding up front.
    """
    model.assert_valid()
    observed = tuple(observed)
    names = model.variable_names
    for name in observed:
        model.variable(name)
    if len(set(observed)) != len(observed):
        raise ValueError("observed variables listed twice")
    obs_pos = [names.index(n) for n in observed]
    rel_pos = [names.index(rv) for rv in model.utility.relevant_vars]
    alternatives = model.decision.alternatives

    # One pass over the full joint, bucketed by observed outcome.
    buckets: dict[tuple[int, ...], list] = {}
    for combo, p in model._iter_joint():
        key = tuple(combo[i] for i in obs_pos)
        proj = tuple(model.chance[i].outcomes[combo[i]] for i in rel_pos)
        bucket = buckets.setdefault(key, [0.0, [0.0] * len(alternatives)])
        bucket[0] += p
        for k, alt in enumerate(alternatives):
            bucket[1][k] += p * model.utility.value(alt, proj)

    eu_baseline_by_alt = [0.0] * len(alternatives)
    for _, partial in buckets.values():
        for k in range(len(alternatives)):
            eu_baseline_by_alt[k] += partial[k]
    eu_baseline = max(eu_baseline_by_alt)

    rows = []
    eu_with_info = 0.0
    for key in sorted(buckets):
        p_s, partial = buckets[key]
        if p_s <= 0.0:
            continue
        best_k = max(range(len(alternatives)), key=lambda k: (partial[k], -k))
        eu_with_info += partial[best_k]
        rows.append(
            OutcomeRow(
                outcome=tuple(
                    (name, model.variable(name).outcomes[key[i]])
                    for i, name in enumerate(observed)
                ),
                probability=p_s,
                best_alternative=alternatives[best_k],
                conditional_eu=partial[best_k] / p_s,
            )
        )
    vpi = eu_with_info - eu_baseline
    if -1e-9 < vpi < 0.0:
        vpi = 0.0
    return ObservationalVpiReport(observed, eu_with_info, eu_baseline, vpi, tuple(rows))


def _resolve_cluster(model: DecisionModel, cluster) -> list:
    refs = []
    for item in cluster:
        ref = parse_ref(item) if isinstance(item, str) else item
        ann = model.annotation_for(ref)
        if ann is None:
            raise AnnotationError(f"{ref} carries no second-order annotation")
        model.point_value(ref)
        refs.append((ref, ann))
    return refs


def cluster_cost(model: DecisionModel, cluster) -> float:
    """Sum of the expected assessment costs over the cluster."""
    return sum(ann.cost_mean for _, ann in _resolve_cluster(model, cluster))


def meta_vpi(
    model: DecisionModel,
    cluster,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> tuple[float, float]:
    """Monte Carlo value of perfect information on the second-order
    distributions of a parameter cluster. Returns (estimate, std error)."""
    est, se, _ = _meta_vpi_full(model, cluster, samples, seed)
    return est, se


def _meta_vpi_full(model, cluster, samples, seed):
    model.assert_valid()
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    refs = _resolve_cluster(model, cluster)

    baseline_model = model
    for ref, ann in refs:
        baseline_model = baseline_model.substitute(ref, ann.distribution.mean())
    baseline = baseline_model.optimal_alternative()
    if not refs:
        return 0.0, 0.0, baseline.alternative
    alternatives = model.decision.alternatives
    base_idx = alternatives.index(baseline.alternative)

    rng = np.random.default_rng(seed)
    draws = []
    for ref, ann in refs:
        v = np.asarray(ann.distribution.sample(rng, samples), dtype=float)
        if isinstance(ref, ProbabilityRef) and np.any((v < 0.0) | (v > 1.0)):
            raise SubstitutionError(
                f"samples from the annotation on {ref} leave [0, 1]"
            )
        draws.append(v)

    evaluator = _BatchEvaluator(model, [ref for ref, _ in refs])
    eu = evaluator.expected_utilities(draws)  # (alternatives, samples)
    z = eu.max(axis=0) - eu[base_idx]
    estimate = float(z.mean())
    std_error = float(z.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return estimate, std_error, baseline.alternative


def recommend(
    model: DecisionModel,
    cluster,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> FocusReport:
    """Decide whether carrying out the cluster's assessment scenarios is
    worth their cost: recommend exactly when estimated value exceeds it."""
    estimate, std_error, baseline_alt = _meta_vpi_full(model, cluster, samples, seed)
    total = cluster_cost(model, cluster)
    refs = tuple(parse_ref(c) if isinstance(c, str) else c for c in cluster)
    return FocusReport(
        cluster=refs,
        vpi_estimate=estimate,
        vpi_std_error=std_error,
        total_cost=total,
        recommend=estimate > total,
        samples=samples,
        seed=seed,
        baseline_alternative=baseline_alt,
    )


def rank_parameters(
    model: DecisionModel,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> list[tuple[ParamRef, FocusReport]]:
    """One single-parameter report per annotation, best net value first.

    Each parameter gets its own derived seed (base seed plus its position
    in the annotation list), so the ranking is reproducible and adding a
    parameter does not reshuffle the draws of the others.
    """
    ranked = []
    for i, ann in enumerate(model.annotations):
        report = recommend(model, [ann.target], samples=samples, seed=seed + i)
        ranked.append((ann.target, report))
    ranked.sort(key=lambda pair: -pair[1].net_value)
    return ranked


class _BatchEvaluator:
    """Expected utility per alternative for many simultaneous parameter
    substitutions, vectorized across draws.

    Substitutions are applied in cluster order; when several cluster
    members share a table row, later substitutions rescale earlier ones
    the same way the scalar rule does.
    """

    def __init__(self, model: DecisionModel, refs):
        model.assert_valid()
        self.model = model
        names = model.variable_names
        self.row_subs: dict[tuple[int, tuple[str, ...]], list[tuple[int, int]]] = {}
        self.util_subs: dict[tuple[str, tuple[str, ...]], int] = {}
        for pos, ref in enumerate(refs):
            if isinstance(ref, ProbabilityRef):
                var = model.variable(ref.variable)
                vi = names.index(ref.variable)
                key = tuple(o for _, o in ref.parents)
                out_i = var.outcome_index(ref.outcome)
                self.row_subs.setdefault((vi, key), []).append((out_i, pos))
            elif isinstance(ref, UtilityRef):
                combo = tuple(o for _, o in ref.assignment)
                self.util_subs[(ref.alternative, combo)] = pos
            else:
                raise UnresolvedRefError(f"not a parameter reference: {ref!r}")

        # Precompile the assignment sweep: per full assignment, the
        # constant factor from untouched rows and the (row, outcome) picks
        # from touched ones.
        vars_ = model.chance
        positions = {v.name: i for i, v in enumerate(vars_)}
        parent_pos = [tuple(positions[p] for p in v.parents) for v in vars_]
        touched_keys = list(self.row_subs.keys())
        touched_index = {rk: i for i, rk in enumerate(touched_keys)}
        self.touched_keys = touched_keys

        rel_pos = [positions[rv] for rv in model.utility.relevant_vars]
        alternatives = model.decision.alternatives
        self.alternatives = alternatives
        plans = []
        for combo in itertools.product(*(range(len(v.outcomes)) for v in vars_)):
            const = 1.0
            picks = []
            for i, v in enumerate(vars_):
                key = tuple(vars_[j].outcomes[combo[j]] for j in parent_pos[i])
                rk = (i, key)
                if rk in touched_index:
                    picks.append((touched_index[rk], combo[i]))
                else:
                    const *= v.table[key][combo[i]]
            proj = tuple(vars_[i].outcomes[combo[i]] for i in rel_pos)
            utils = []
            for alt in alternatives:
                sub = self.util_subs.get((alt, proj))
                utils.append((model.utility.value(alt, proj), sub))
            plans.append((const, tuple(picks), tuple(utils)))
        self.plans = plans

    def _substituted_rows(self, draws):
        n = len(draws[0]) if draws else 1
        rows = []
        for (vi, key), subs in zip(self.touched_keys, (self.row_subs[rk] for rk in self.touched_keys)):
            base = np.array(self.model.chance[vi].table[key], dtype=float)
            mat = np.broadcast_to(base, (n, base.size)).copy()
            for out_i, pos in subs:
                v = draws[pos]
                current = mat[:, out_i].copy()
                rest = 1.0 - current
                safe = rest > 0.0
                scale = np.where(safe, (1.0 - v) / np.where(safe, rest, 1.0), 0.0)
                mat *= scale[:, None]
                if not safe.all():
                    share = (1.0 - v) / (base.size - 1)
                    mat[~safe, :] = share[~safe, None]
                mat[:, out_i] = v
            rows.append(mat)
        return rows

    def expected_utilities(self, draws) -> np.ndarray:
        """(alternatives, draws) matrix of expected utilities with the
        cluster parameters set to the given draw vectors."""
        n = len(draws[0]) if draws else 1
        rows = self._substituted_rows(draws)
        eu = np.zeros((len(self.alternatives), n))
        for const, picks, utils in self.plans:
            if const == 0.0 and not picks:
                continue
            w = np.full(n, const)
            for row_i, out_i in picks:
                w = w * rows[row_i][:, out_i]
            for k, (u, sub) in enumerate(utils):
                if sub is None:
                    if u != 0.0:
                        eu[k] += w * u
                else:
                    eu[k] += w * draws[sub]
        return eu

    def marginals(self, draws, variable: str, outcome: str) -> np.ndarray:
        """(draws,) vector of the marginal probability of one outcome
        under the substitutions."""
        names = self.model.variable_names
        vi = names.index(variable)
        var = self.model.chance[vi]
        out_i = var.outcome_index(outcome)
        n = len(draws[0]) if draws else 1
        rows = self._substituted_rows(draws)
        total = np.zeros(n)
        vars_ = self.model.chance
        positions = {v.name: i for i, v in enumerate(vars_)}
        parent_pos = [tuple(positions[p] for p in v.parents) for v in vars_]
        touched_index = {rk: i for i, rk in enumerate(self.touched_keys)}
        for combo in itertools.product(*(range(len(v.outcomes)) for v in vars_)):
            if combo[vi] != out_i:
                continue
            w = np.ones(n)
            const = 1.0
            for i, v in enumerate(vars_):
                key = tuple(vars_[j].outcomes[combo[j]] for j in parent_pos[i])
                rk = (i, key)
                if rk in touched_index:
                    w = w * rows[touched_index[rk]][:, combo[i]]
                else:
                    const *= v.table[key][combo[i]]
            total += const * w
        return total


def focus_report_json(report: FocusReport) -> str:
    return json.dumps(report.to_dict(), indent=2)

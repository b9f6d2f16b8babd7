"""Command-line front door.

Every subcommand loads a model file, calls the core library, and prints
either human-oriented text or machine-stable JSON (``--format json``; all
numbers at full precision). Exit codes: 0 on success, 1 when a file or
model is bad, 2 on usage errors.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from .errors import WorkbenchError
from .intervals import ProbabilityInterval, conjunction_bounds, marginal_bounds
from .modelio import load_model, save_model
from .model import ChanceVariable
from .paramref import parse_ref, split_ref_list
from .sensitivity import emit_plot_data, sweep as run_sweep
from .voi import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    observational_vpi,
    rank_parameters,
    recommend,
)


def _die(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (WorkbenchError, ValueError, OSError) as exc:
            _die(str(exc))

    return wrapper


format_option = click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
seed_option = click.option(
    "--seed",
    type=int,
    default=DEFAULT_SEED,
    show_default=True,
    envvar="VOI_WORKBENCH_SEED",
    help="Monte Carlo seed (env: VOI_WORKBENCH_SEED).",
)
samples_option = click.option(
    "--samples", type=int, default=DEFAULT_SAMPLES, show_default=True
)


@click.group()
@click.version_option(package_name="voi-workbench")
def main():
    """Decision-model workbench: evaluation, value of information, and
    elicitation-focus analysis for discrete decision models."""


@main.command("validate")
@click.argument("model_path", type=click.Path(dir_okay=False))
@format_option
@handle_errors
def validate_cmd(model_path, fmt):
    """Check a model file; diagnostics go to stderr with exit code 1."""
    model = load_model(model_path)
    diags = model.validate()
    if diags:
        if fmt == "json":
            click.echo(json.dumps({"diagnostics": [str(d) for d in diags]}), err=True)
        else:
            for d in diags:
                click.echo(str(d), err=True)
        sys.exit(1)
    click.echo(json.dumps({"diagnostics": []}) if fmt == "json" else "ok")


@main.command("eval")
@click.argument("model_path", type=click.Path(dir_okay=False))
@format_option
@handle_errors
def eval_cmd(model_path, fmt):
    """Marginals, per-alternative expected utility, and the best choice."""
    model = load_model(model_path)
    model.assert_valid()
    marginals = {
        v.name: {o: model.marginal(v.name, o) for o in v.outcomes} for v in model.chance
    }
    eus = {alt: model.expected_utility(alt) for alt in model.decision.alternatives}
    choice = model.optimal_alternative()
    payload = {
        "marginals": marginals,
        "expected_utilities": eus,
        "optimal": choice.alternative,
        "expected_utility": choice.expected_utility,
        "tie": choice.tie,
    }
    if fmt == "json":
        click.echo(json.dumps(payload))
        return
    for name, dist in marginals.items():
        line = "  ".join(f"{name}={o}: {p:.6g}" for o, p in dist.items())
        click.echo(f"p  {line}")
    for alt, eu in eus.items():
        click.echo(f"EU({alt}) = {eu:.6g}")
    tie = " (tie, first declared wins)" if choice.tie else ""
    click.echo(f"optimal: {choice.alternative} = {choice.expected_utility:.6g}{tie}")


@main.command("voi")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--observe", required=True, help="Comma-separated chance variables.")
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text", show_default=True
)
@handle_errors
def voi_cmd(model_path, observe, fmt):
    """Value of perfectly observing variables before deciding."""
    model = load_model(model_path)
    observed = [v.strip() for v in observe.split(",") if v.strip()]
    report = observational_vpi(model, observed)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict()))
    elif fmt == "csv":
        click.echo(report.to_csv(), nl=False)
    else:
        click.echo(f"EU with information: {report.eu_with_info:.6g}")
        click.echo(f"EU deciding now:     {report.eu_baseline:.6g}")
        click.echo(f"value of perfect information: {report.vpi:.6g}")
        for row in report.rows:
            from .paramref import render_assignment

            click.echo(
                f"  {render_assignment(row.outcome) or '(nothing observed)'}: "
                f"p={row.probability:.6g} best={row.best_alternative} "
                f"EU={row.conditional_eu:.6g}"
            )


@main.command("focus")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option(
    "--cluster",
    required=True,
    help='Comma-separated parameter references, e.g. "p(Win=yes)".',
)
@samples_option
@seed_option
@format_option
@handle_errors
def focus_cmd(model_path, cluster, samples, seed, fmt):
    """Estimate the value of the cluster's assessment scenarios and
    recommend whether they are worth their cost."""
    model = load_model(model_path)
    refs = split_ref_list(cluster)
    if not refs:
        raise ValueError("empty cluster")
    report = recommend(model, refs, samples=samples, seed=seed)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict()))
        return
    click.echo(f"cluster: {', '.join(r.render() for r in report.cluster)}")
    click.echo(
        f"value of refining: {report.vpi_estimate:.6g} "
        f"(std error {report.vpi_std_error:.3g}, {report.samples} samples, seed {report.seed})"
    )
    click.echo(f"assessment cost:   {report.total_cost:.6g}")
    verdict = "worth doing" if report.recommend else "not worth doing"
    click.echo(f"recommendation:    {verdict}")
    click.echo(
        f"(baseline alternative {report.baseline_alternative}, "
        f"{report.baseline_convention} convention)"
    )


@main.command("rank")
@click.argument("model_path", type=click.Path(dir_okay=False))
@samples_option
@seed_option
@format_option
@handle_errors
def rank_cmd(model_path, samples, seed, fmt):
    """Rank every annotated parameter by estimated net refinement value."""
    model = load_model(model_path)
    ranking = rank_parameters(model, samples=samples, seed=seed)
    if fmt == "json":
        click.echo(
            json.dumps(
                [{"param": ref.render(), **rep.to_dict()} for ref, rep in ranking]
            )
        )
        return
    if not ranking:
        click.echo("no annotated parameters")
        return
    for ref, rep in ranking:
        mark = "refine " if rep.recommend else "skip   "
        click.echo(
            f"{mark} {ref.render()}  value {rep.vpi_estimate:.6g} "
            f"- cost {rep.total_cost:.6g} = net {rep.net_value:.6g}"
        )


@main.command("sweep")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--param", required=True, help="Parameter reference to sweep.")
@click.option("--grid", type=int, default=101, show_default=True)
@click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True
)
@click.option("--range", "value_range", default=None, help="lo:hi for utility entries.")
@handle_errors
def sweep_cmd(model_path, param, grid, fmt, value_range):
    """Per-alternative expected utility across a parameter's range."""
    model = load_model(model_path)
    vr = None
    if value_range is not None:
        lo, _, hi = value_range.partition(":")
        vr = (float(lo), float(hi))
    result = run_sweep(model, param, grid_size=grid, value_range=vr)
    sys.stdout.buffer.write(emit_plot_data(result, fmt))
    sys.stdout.buffer.flush()


@main.command("bounds")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option(
    "--interval",
    "intervals_",
    multiple=True,
    required=True,
    help='Override like "p(Field=dry)=0.6:0.8"; repeatable.',
)
@click.option("--target", required=True, help="Target marginal as Var=outcome.")
@format_option
@handle_errors
def bounds_cmd(model_path, intervals_, target, fmt):
    """Bounds on a marginal when entries are known only to intervals."""
    model = load_model(model_path)
    overrides = []
    for spec in intervals_:
        ref_text, sep, bounds_text = spec.rpartition("=")
        if not sep or ":" not in bounds_text:
            raise ValueError(f'interval must look like "p(X=y)=lo:hi", got {spec!r}')
        lo, _, hi = bounds_text.partition(":")
        overrides.append((parse_ref(ref_text), ProbabilityInterval(float(lo), float(hi))))
    var, sep, outcome = target.partition("=")
    if not sep:
        raise ValueError(f'target must look like "Var=outcome", got {target!r}')
    report = marginal_bounds(model, overrides, (var.strip(), outcome.strip()))
    if fmt == "json":
        click.echo(json.dumps(report.to_dict()))
        return
    click.echo(f"p({target}) in [{report.low:.9g}, {report.high:.9g}]")
    if report.renormalized:
        click.echo(
            "note: sibling outcomes were rescaled for "
            + ", ".join(report.renormalized)
            + " (rows with more than two outcomes)"
        )


@main.command("refine")
@click.argument("model_path", type=click.Path(dir_okay=False))
@click.option("--target", required=True, help="Unconditioned probability to refine.")
@click.option(
    "--with",
    "extension_path",
    required=True,
    type=click.Path(dir_okay=False),
    help="JSON file with new_parents and cpt.",
)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@format_option
@handle_errors
def refine_cmd(model_path, target, extension_path, output, fmt):
    """Condition a directly assessed probability on new variables."""
    model = load_model(model_path)
    with open(extension_path, encoding="utf-8") as fh:
        spec = json.load(fh)
    new_parents = [
        ChanceVariable(
            p["name"],
            tuple(p["outcomes"]),
            tuple(p.get("parents", ())),
            {
                _split_key(k): _row_values(row, p["outcomes"])
                for k, row in p["table"].items()
            },
        )
        for p in spec["new_parents"]
    ]
    cpt = {_split_key(k): row for k, row in spec["cpt"].items()}
    ref = parse_ref(target)
    before = model.point_value(ref)
    refined = model.refine(ref, new_parents, cpt)
    save_model(refined, output)
    after = refined.marginal(ref.variable, ref.outcome)
    if fmt == "json":
        click.echo(
            json.dumps(
                {"output": output, "point_before": before, "marginal_after": after}
            )
        )
    else:
        click.echo(f"wrote {output}")
        click.echo(f"{ref}: direct value {before:.6g} -> marginal {after:.6g}")


def _split_key(key: str) -> tuple[str, ...]:
    from .paramref import parse_assignment

    return tuple(o for _, o in parse_assignment(key))


def _row_values(row, outcomes) -> tuple[float, ...]:
    if isinstance(row, dict):
        return tuple(float(row[o]) for o in outcomes)
    return tuple(float(p) for p in row)


@main.command("serve")
@click.option("--port", type=int, default=7431, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@handle_errors
def serve_cmd(port, host):
    """Run the local HTTP API for the workbench UI."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()

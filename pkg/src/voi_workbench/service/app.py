"""HTTP/JSON API for interactive elicitation sessions.

Serves the workbench UI on localhost. Sessions are in-memory; every
mutation bumps the session revision and every computation response echoes
the revision it was computed against, so a client can tell stale results
from fresh ones. Mutations accept an ``expected_revision`` for optimistic
concurrency (mismatch is a 409).
"""

from __future__ import annotations

import urllib.parse
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .. import sensitivity, voi
from ..confidence import SecondOrderAnnotation, coherence_check
from ..errors import (
    AnnotationError,
    ModelFileError,
    ModelValidationError,
    ParamRefError,
    RefineError,
    SubstitutionError,
    UnresolvedRefError,
    WorkbenchError,
)
from ..intervals import ProbabilityInterval, marginal_bounds
from ..model import ChanceVariable, DecisionModel
from ..modelio import (
    annotation_to_dict,
    distribution_from_dict,
    distribution_to_dict,
    model_from_dict,
    model_to_dict,
    save_model,
)
from ..paramref import parse_assignment, parse_ref, render_assignment
from . import schemas
from .sessions import NothingToUndo, RevisionConflict, Session, SessionStore

DEFAULT_PORT = 7431


def create_app() -> FastAPI:
    app = FastAPI(
        title="voi-workbench service",
        description=(
            "Evaluate discrete decision models, annotate parameters with "
            "second-order confidence distributions, and compute which "
            "refinements are worth their assessment cost."
        ),
        version="0.1.0",
    )
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore()

    def get_session(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise HTTPException(404, detail=f"no session {session_id!r}")
        return session

    @app.exception_handler(WorkbenchError)
    async def workbench_error(request, exc: WorkbenchError):
        from fastapi.responses import JSONResponse

        if isinstance(exc, UnresolvedRefError):
            return JSONResponse(status_code=404, content={"detail": str(exc)})
        if isinstance(exc, ModelValidationError):
            return JSONResponse(
                status_code=400,
                content={"detail": "model validation failed",
                         "diagnostics": [str(d) for d in exc.diagnostics]},
            )
        if isinstance(
            exc, (ParamRefError, ModelFileError, RefineError, AnnotationError, SubstitutionError)
        ):
            return JSONResponse(
                status_code=400, content={"detail": str(exc), "diagnostics": [str(exc)]}
            )
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(RevisionConflict)
    async def revision_conflict(request, exc: RevisionConflict):
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=409,
            content={"detail": str(exc), "revision": exc.actual},
        )

    @app.post("/sessions", response_model=schemas.SessionCreated, status_code=201)
    def create_session(spec: schemas.ModelSpec):
        model = model_from_dict(spec.model_dump(exclude_none=True))
        diags = model.validate()
        if diags:
            raise ModelValidationError(diags)
        session = store.create(model)
        return schemas.SessionCreated(id=session.id, revision=session.revision)

    @app.get("/sessions/{session_id}/model", response_model=schemas.ModelResponse)
    def get_model(session_id: str):
        model, revision = get_session(session_id).read()
        return schemas.ModelResponse(revision=revision, model=model_to_dict(model))

    @app.post("/sessions/{session_id}/refine", response_model=schemas.RevisionResponse)
    def refine(session_id: str, req: schemas.RefineRequest):
        session = get_session(session_id)
        target = parse_ref(req.target)
        parents = [
            ChanceVariable(
                s.name,
                tuple(s.outcomes),
                tuple(s.parents),
                {
                    tuple(o for _, o in parse_assignment(k)): tuple(
                        row[o] for o in s.outcomes
                    )
                    for k, row in s.table.items()
                },
            )
            for s in req.new_parents
        ]
        cpt = {
            tuple(o for _, o in parse_assignment(k)): row for k, row in req.cpt.items()
        }
        dropped: list[str] = []

        def apply(model: DecisionModel) -> DecisionModel:
            before = {a.target.render() for a in model.annotations}
            refined = model.refine(target, parents, cpt)
            after = {a.target.render() for a in refined.annotations}
            dropped.extend(sorted(before - after))
            return refined

        revision = session.mutate(
            "refine",
            {
                "target": req.target,
                "new_parents": [s.model_dump() for s in req.new_parents],
                "cpt": req.cpt,
            },
            req.expected_revision,
            apply,
        )
        return schemas.RevisionResponse(revision=revision, dropped_annotations=dropped)

    @app.put(
        "/sessions/{session_id}/annotations/{ref_text:path}",
        response_model=schemas.AnnotationPutResponse,
    )
    def put_annotation(session_id: str, ref_text: str, req: schemas.AnnotationPutRequest):
        session = get_session(session_id)
        target = parse_ref(urllib.parse.unquote(ref_text))
        distribution, fractiles = distribution_from_dict(req.distribution.to_plain())
        annotation = SecondOrderAnnotation(
            target, req.scenario, distribution, req.cost, fractiles
        )

        def apply(model: DecisionModel) -> DecisionModel:
            model.point_value(target)  # 404 if the entry does not exist
            kept = tuple(a for a in model.annotations if a.target != target)
            candidate = replace(model, annotations=kept + (annotation,))
            candidate.assert_valid()
            return candidate

        revision = session.mutate(
            "annotate",
            {"annotation": annotation_to_dict(annotation)},
            req.expected_revision,
            apply,
        )
        model, _ = session.read()
        warning = coherence_check(model, annotation)
        return schemas.AnnotationPutResponse(
            revision=revision,
            target=target.render(),
            distribution=distribution_to_dict(distribution, fractiles),
            mean=distribution.mean(),
            coherence_warning=(
                schemas.CoherenceInfo(
                    target=warning.target.render(),
                    point_value=warning.point_value,
                    distribution_mean=warning.distribution_mean,
                    gap=warning.gap,
                    threshold=warning.threshold,
                )
                if warning
                else None
            ),
        )

    @app.get("/sessions/{session_id}/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(session_id: str):
        model, revision = get_session(session_id).read()
        model.assert_valid()
        choice = model.optimal_alternative()
        return schemas.EvaluateResponse(
            revision=revision,
            optimal=choice.alternative,
            expected_utility=choice.expected_utility,
            tie=choice.tie,
            expected_utilities={
                alt: model.expected_utility(alt) for alt in model.decision.alternatives
            },
            marginals={
                v.name: {o: model.marginal(v.name, o) for o in v.outcomes}
                for v in model.chance
            },
        )

    @app.post("/sessions/{session_id}/voi", response_model=schemas.VoiResponse)
    def observational(session_id: str, req: schemas.VoiRequest):
        model, revision = get_session(session_id).read()
        report = voi.observational_vpi(model, req.observed)
        payload = report.to_dict()
        return schemas.VoiResponse(revision=revision, **payload)

    @app.post("/sessions/{session_id}/focus", response_model=schemas.FocusResponse)
    def focus(session_id: str, req: schemas.FocusRequest):
        model, revision = get_session(session_id).read()
        report = voi.recommend(model, req.cluster, samples=req.samples, seed=req.seed)
        return schemas.FocusResponse(revision=revision, **report.to_dict())

    @app.get("/sessions/{session_id}/rank", response_model=schemas.RankResponse)
    def rank(session_id: str, samples: int = voi.DEFAULT_SAMPLES, seed: int = voi.DEFAULT_SEED):
        model, revision = get_session(session_id).read()
        ranking = voi.rank_parameters(model, samples=samples, seed=seed)
        return schemas.RankResponse(
            revision=revision,
            ranking=[
                schemas.RankEntry(
                    param=ref.render(), report=schemas.FocusReportModel(**rep.to_dict())
                )
                for ref, rep in ranking
            ],
        )

    @app.post("/sessions/{session_id}/sweep", response_model=schemas.SweepResponse)
    def sweep_endpoint(session_id: str, req: schemas.SweepRequest):
        model, revision = get_session(session_id).read()
        result = sensitivity.sweep(
            model, req.param, grid_size=req.grid, value_range=req.value_range
        )
        return schemas.SweepResponse(revision=revision, **result.to_dict())

    @app.post("/sessions/{session_id}/bounds", response_model=schemas.BoundsResponse)
    def bounds(session_id: str, req: schemas.BoundsRequest):
        model, revision = get_session(session_id).read()
        var, sep, outcome = req.target.partition("=")
        if not sep:
            raise ParamRefError(f'bounds target must look like "Var=outcome", got {req.target!r}')
        overrides = [
            (parse_ref(iv.param), ProbabilityInterval(iv.low, iv.high))
            for iv in req.intervals
        ]
        report = marginal_bounds(model, overrides, (var.strip(), outcome.strip()))
        return schemas.BoundsResponse(
            revision=revision,
            target=req.target,
            low=report.low,
            high=report.high,
            renormalized=list(report.renormalized),
            vertices=report.vertices,
        )

    @app.post("/sessions/{session_id}/undo", response_model=schemas.RevisionResponse)
    def undo(session_id: str, req: schemas.UndoRequest | None = None):
        session = get_session(session_id)
        expected = req.expected_revision if req else None
        try:
            revision = session.undo(expected)
        except NothingToUndo:
            raise HTTPException(400, detail="nothing to undo")
        return schemas.RevisionResponse(revision=revision)

    @app.post("/sessions/{session_id}/save", response_model=schemas.SaveResponse)
    def save(session_id: str, req: schemas.SaveRequest):
        session = get_session(session_id)
        with session.lock:
            if req.expected_revision is not None and req.expected_revision != session.revision:
                raise RevisionConflict(req.expected_revision, session.revision)
            save_model(session.model, req.path)
            return schemas.SaveResponse(revision=session.revision, path=req.path)

    @app.post("/distributions/preview", response_model=schemas.PreviewResponse)
    def preview(req: schemas.PreviewRequest):
        distribution, _ = distribution_from_dict(req.distribution.to_plain())
        lo, hi = distribution.support
        if lo == hi:  # point mass: a two-point tabulation is all there is
            return schemas.PreviewResponse(
                xs=[lo, hi], cdf=[0.0, 1.0], pdf=None, mean=lo, support=(lo, hi)
            )
        n = max(2, min(req.points, 2001))
        xs = np.linspace(lo, hi, n)
        cdf = np.asarray(distribution.cdf(xs), dtype=float)
        pdf = None
        if hasattr(distribution, "pdf"):
            pdf = [float(v) for v in np.asarray(distribution.pdf(xs), dtype=float)]
        return schemas.PreviewResponse(
            xs=[float(v) for v in xs],
            cdf=[float(v) for v in cdf],
            pdf=pdf,
            mean=distribution.mean(),
            support=(lo, hi),
        )

    return app

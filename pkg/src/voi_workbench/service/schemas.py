"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class FractileSpec(BaseModel):
    p: float
    q: float


class DistributionSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["beta", "sketch", "degenerate"]
    alpha: float | None = None
    beta: float | None = None
    support: tuple[float, float] | None = None
    fractiles: list[FractileSpec] | None = None
    cdf: list[tuple[float, float]] | None = None
    points: list[tuple[float, float]] | None = None
    value: float | None = None

    def to_plain(self) -> dict:
        return self.model_dump(exclude_none=True)


class AnnotationSpec(BaseModel):
    target: str
    scenario: str
    cost: float
    distribution: DistributionSpec


class ChanceVariableSpec(BaseModel):
    name: str
    outcomes: list[str]
    parents: list[str] = Field(default_factory=list)
    table: dict[str, dict[str, float]]


class DecisionSpec(BaseModel):
    name: str
    alternatives: list[str]


class UtilitySpec(BaseModel):
    relevant_vars: list[str] = Field(default_factory=list)
    entries: dict[str, float]


class ModelSpec(BaseModel):
    chance: list[ChanceVariableSpec]
    decision: DecisionSpec
    utility: UtilitySpec
    annotations: list[AnnotationSpec] = Field(default_factory=list)


class SessionCreated(BaseModel):
    id: str
    revision: int


class ModelResponse(BaseModel):
    revision: int
    model: dict


class RevisionResponse(BaseModel):
    revision: int
    dropped_annotations: list[str] = Field(default_factory=list)


class RefineRequest(BaseModel):
    target: str
    new_parents: list[ChanceVariableSpec]
    cpt: dict[str, dict[str, float]]
    expected_revision: int | None = None


class AnnotationPutRequest(BaseModel):
    scenario: str
    cost: float
    distribution: DistributionSpec
    expected_revision: int | None = None


class CoherenceInfo(BaseModel):
    target: str
    point_value: float
    distribution_mean: float
    gap: float
    threshold: float


class AnnotationPutResponse(BaseModel):
    revision: int
    target: str
    distribution: dict
    mean: float
    coherence_warning: CoherenceInfo | None = None


class EvaluateResponse(BaseModel):
    revision: int
    optimal: str
    expected_utility: float
    tie: bool
    expected_utilities: dict[str, float]
    marginals: dict[str, dict[str, float]]


class VoiRequest(BaseModel):
    observed: list[str]


class VoiRow(BaseModel):
    outcome: str
    probability: float
    best_alternative: str
    conditional_eu: float


class VoiResponse(BaseModel):
    revision: int
    observed: list[str]
    eu_with_info: float
    eu_baseline: float
    vpi: float
    table: list[VoiRow]


class FocusRequest(BaseModel):
    cluster: list[str]
    samples: int = 100_000
    seed: int = 0


class FocusReportModel(BaseModel):
    cluster: list[str]
    vpi_estimate: float
    vpi_std_error: float
    total_cost: float
    recommend: bool
    samples: int
    seed: int
    baseline_alternative: str
    baseline_convention: str


class FocusResponse(FocusReportModel):
    revision: int


class RankEntry(BaseModel):
    param: str
    report: FocusReportModel


class RankResponse(BaseModel):
    revision: int
    ranking: list[RankEntry]


class SweepRequest(BaseModel):
    param: str
    grid: int = 101
    value_range: tuple[float, float] | None = None


class SweepResponse(BaseModel):
    revision: int
    param: str
    baseline_value: float
    grid: list[float]
    series: dict[str, list[float]]
    crossings: list[float]


class IntervalSpec(BaseModel):
    param: str
    low: float
    high: float


class BoundsRequest(BaseModel):
    intervals: list[IntervalSpec]
    target: str


class BoundsResponse(BaseModel):
    revision: int
    target: str
    low: float
    high: float
    renormalized: list[str]
    vertices: int


class UndoRequest(BaseModel):
    expected_revision: int | None = None


class SaveRequest(BaseModel):
    path: str
    expected_revision: int | None = None


class SaveResponse(BaseModel):
    revision: int
    path: str


class PreviewRequest(BaseModel):
    distribution: DistributionSpec
    points: int = 201


class PreviewResponse(BaseModel):
    xs: list[float]
    cdf: list[float]
    pdf: list[float] | None = None
    mean: float
    support: tuple[float, float]

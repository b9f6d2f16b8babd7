/** Payload shapes of the workbench service, mirrored field-for-field.
 * The UI never invents numbers: everything displayed is read from one of
 * these responses. */

export interface ChanceVariableDoc {
  name: string;
  outcomes: string[];
  parents: string[];
  table: Record<string, Record<string, number>>;
}

export interface ModelDoc {
  chance: ChanceVariableDoc[];
  decision: { name: string; alternatives: string[] };
  utility: { relevant_vars: string[]; entries: Record<string, number> };
  annotations: AnnotationDoc[];
}

export interface AnnotationDoc {
  target: string;
  scenario: string;
  cost: number;
  distribution: DistributionDoc;
}

export interface DistributionDoc {
  family: "beta" | "sketch" | "degenerate";
  alpha?: number;
  beta?: number;
  support?: [number, number];
  fractiles?: { p: number; q: number }[];
  cdf?: [number, number][];
  points?: [number, number][];
  value?: number;
}

export interface SessionCreated {
  id: string;
  revision: number;
}

export interface ModelResponse {
  revision: number;
  model: ModelDoc;
}

export interface EvaluateResponse {
  revision: number;
  optimal: string;
  expected_utility: number;
  tie: boolean;
  expected_utilities: Record<string, number>;
  marginals: Record<string, Record<string, number>>;
}

export interface RevisionResponse {
  revision: number;
  dropped_annotations: string[];
}

export interface CoherenceInfo {
  target: string;
  point_value: number;
  distribution_mean: number;
  gap: number;
  threshold: number;
}

export interface AnnotationPutResponse {
  revision: number;
  target: string;
  distribution: DistributionDoc;
  mean: number;
  coherence_warning: CoherenceInfo | null;
}

export interface FocusReportDoc {
  cluster: string[];
  vpi_estimate: number;
  vpi_std_error: number;
  total_cost: number;
  recommend: boolean;
  samples: number;
  seed: number;
  baseline_alternative: string;
  baseline_convention: string;
}

export interface FocusResponse extends FocusReportDoc {
  revision: number;
}

export interface RankResponse {
  revision: number;
  ranking: { param: string; report: FocusReportDoc }[];
}

export interface SweepResponse {
  revision: number;
  param: string;
  baseline_value: number;
  grid: number[];
  series: Record<string, number[]>;
  crossings: number[];
}

export interface PreviewResponse {
  xs: number[];
  cdf: number[];
  pdf: number[] | null;
  mean: number;
  support: [number, number];
}

export interface RefineRequestBody {
  target: string;
  new_parents: ChanceVariableDoc[];
  cpt: Record<string, Record<string, number>>;
  expected_revision: number;
}

export interface AnnotationPutBody {
  scenario: string;
  cost: number;
  distribution: DistributionDoc;
  expected_revision: number;
}

/** Workbench state and the flows the views drive.
 *
 * State changes only here. Every computed quantity is stored as a
 * `Stamped<T>`: the service payload plus the session revision it was
 * computed against, so views can flag anything stale after a later
 * mutation. Mutations always send the currently known revision as
 * `expected_revision`; a 409 sets `conflict` and nothing is retried.
 */

import { ApiClient, ConflictError, ApiError } from "./api.js";
import type {
  AnnotationPutResponse,
  ChanceVariableDoc,
  CoherenceInfo,
  EvaluateResponse,
  FocusResponse,
  ModelDoc,
  PreviewResponse,
  RankResponse,
  SweepResponse,
} from "./types.js";

export interface Stamped<T> {
  data: T;
  revision: number;
}

export interface DraftAnnotation {
  fractiles: { p: number; q: string }[];
  scenario: string;
  cost: string;
}

export interface WorkbenchState {
  sessionId: string | null;
  model: Stamped<ModelDoc> | null;
  revision: number;
  evaluation: Stamped<EvaluateResponse> | null;
  preRefineEvaluation: Stamped<EvaluateResponse> | null;
  droppedAnnotations: string[];
  selectedParam: string | null;
  draft: DraftAnnotation;
  preview: PreviewResponse | null;
  coherence: CoherenceInfo | null;
  focusReports: Stamped<FocusResponse>[];
  ranking: Stamped<RankResponse> | null;
  sweep: Stamped<SweepResponse> | null;
  analysisRunning: boolean;
  conflict: { message: string; serverRevision: number } | null;
  error: { message: string; diagnostics: string[] } | null;
  busy: boolean;
}

export function initialState(): WorkbenchState {
  return {
    sessionId: null,
    model: null,
    revision: -1,
    evaluation: null,
    preRefineEvaluation: null,
    droppedAnnotations: [],
    selectedParam: null,
    draft: { fractiles: [{ p: 0.25, q: "" }, { p: 0.75, q: "" }], scenario: "", cost: "" },
    preview: null,
    coherence: null,
    focusReports: [],
    ranking: null,
    sweep: null,
    analysisRunning: false,
    conflict: null,
    error: null,
    busy: false,
  };
}

export function isStale(state: WorkbenchState, stamped: Stamped<unknown> | null): boolean {
  return stamped !== null && stamped.revision !== state.revision;
}

type Listener = (state: WorkbenchState) => void;

export class WorkbenchStore {
  state: WorkbenchState = initialState();
  private listeners: Listener[] = [];
  private analysisAbort: AbortController | null = null;

  constructor(public readonly api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private update(patch: Partial<WorkbenchState>): void {
    this.state = { ...this.state, ...patch };
    this.emit();
  }

  private fail(err: unknown): never {
    if (err instanceof ConflictError) {
      this.update({
        busy: false,
        conflict: { message: err.detail, serverRevision: err.serverRevision },
      });
    } else if (err instanceof ApiError) {
      this.update({
        busy: false,
        error: { message: err.detail, diagnostics: err.diagnostics },
      });
    } else {
      this.update({ busy: false, error: { message: String(err), diagnostics: [] } });
    }
    throw err;
  }

  dismissError(): void {
    this.update({ error: null });
  }

  /** Pull the server's current model and evaluation; also how a conflict
   * prompt is resolved (never by replaying the rejected mutation). */
  async refreshFromServer(): Promise<void> {
    const id = this.requireSession();
    const model = await this.api.getModel(id);
    const evaluation = await this.api.evaluate(id);
    this.update({
      model: { data: model.model, revision: model.revision },
      evaluation: { data: evaluation, revision: evaluation.revision },
      revision: evaluation.revision,
      conflict: null,
    });
  }

  async loadModel(doc: ModelDoc): Promise<void> {
    this.update({ ...initialState(), busy: true });
    try {
      const created = await this.api.createSession(doc);
      this.update({ sessionId: created.id, revision: created.revision });
      await this.refreshFromServer();
      this.update({ busy: false });
    } catch (err) {
      this.fail(err);
    }
  }

  selectParam(ref: string | null): void {
    this.update({ selectedParam: ref, preview: null, coherence: null });
  }

  setDraft(patch: Partial<DraftAnnotation>): void {
    this.update({ draft: { ...this.state.draft, ...patch } });
  }

  /** Parse the two-fractile draft; null while the quantiles are not yet
   * two ordered numbers. Input parsing only, no distribution math. */
  draftDistribution(): { family: "beta"; fractiles: { p: number; q: number }[] } | null {
    const parsed = this.state.draft.fractiles.map((f) => ({ p: f.p, q: Number(f.q) }));
    if (parsed.some((f) => !Number.isFinite(f.q) || f.q <= 0 || f.q >= 1)) return null;
    if (parsed.length !== 2) return null;
    const [lo, hi] = [...parsed].sort((a, b) => a.p - b.p);
    if (lo!.q >= hi!.q) return null;
    return { family: "beta", fractiles: parsed };
  }

  /** Ask the service to tabulate the fitted density for the live preview. */
  async requestPreview(): Promise<void> {
    const distribution = this.draftDistribution();
    if (!distribution) {
      this.update({ preview: null });
      return;
    }
    try {
      const preview = await this.api.preview(distribution);
      this.update({ preview });
    } catch (err) {
      this.fail(err);
    }
  }

  async saveAnnotation(): Promise<AnnotationPutResponse> {
    const id = this.requireSession();
    const ref = this.state.selectedParam;
    if (!ref) throw new Error("no parameter selected");
    const distribution = this.draftDistribution();
    if (!distribution) throw new Error("draft fractiles are not two ordered quantiles in (0, 1)");
    const cost = Number(this.state.draft.cost);
    if (!Number.isFinite(cost) || cost < 0) throw new Error("cost must be a nonnegative number");
    if (!this.state.draft.scenario.trim()) throw new Error("describe the assessment scenario");
    this.update({ busy: true });
    try {
      const resp = await this.api.putAnnotation(id, ref, {
        scenario: this.state.draft.scenario,
        cost,
        distribution,
        expected_revision: this.state.revision,
      });
      const model = await this.api.getModel(id);
      this.update({
        busy: false,
        revision: resp.revision,
        coherence: resp.coherence_warning,
        model: { data: model.model, revision: model.revision },
      });
      return resp;
    } catch (err) {
      this.fail(err);
    }
  }

  /** Monte Carlo focus run; asynchronous with cancellation. */
  async analyze(cluster: string[], samples: number, seed: number): Promise<FocusResponse> {
    const id = this.requireSession();
    this.analysisAbort = new AbortController();
    this.update({ analysisRunning: true });
    try {
      const report = await this.api.focus(id, cluster, samples, seed, this.analysisAbort.signal);
      this.update({
        analysisRunning: false,
        focusReports: [{ data: report, revision: report.revision }, ...this.state.focusReports],
      });
      return report;
    } catch (err) {
      this.update({ analysisRunning: false });
      if ((err as Error).name === "AbortError") throw err;
      this.fail(err);
    } finally {
      this.analysisAbort = null;
    }
  }

  cancelAnalysis(): void {
    this.analysisAbort?.abort();
    this.update({ analysisRunning: false });
  }

  async runRank(samples: number, seed: number): Promise<void> {
    const id = this.requireSession();
    this.update({ analysisRunning: true });
    try {
      const ranking = await this.api.rank(id, samples, seed);
      this.update({
        analysisRunning: false,
        ranking: { data: ranking, revision: ranking.revision },
      });
    } catch (err) {
      this.update({ analysisRunning: false });
      this.fail(err);
    }
  }

  async runSweep(param: string, grid = 101): Promise<void> {
    const id = this.requireSession();
    try {
      const sweep = await this.api.sweep(id, param, grid);
      this.update({ sweep: { data: sweep, revision: sweep.revision } });
    } catch (err) {
      this.fail(err);
    }
  }

  /** Extend a direct probability onto conditioning variables; the
   * pre-refinement evaluation is kept for the side-by-side panel. */
  async runRefine(
    target: string,
    newParents: ChanceVariableDoc[],
    cpt: Record<string, Record<string, number>>,
  ): Promise<void> {
    const id = this.requireSession();
    this.update({ busy: true });
    try {
      const before = this.state.evaluation;
      const resp = await this.api.refine(id, {
        target,
        new_parents: newParents,
        cpt,
        expected_revision: this.state.revision,
      });
      const model = await this.api.getModel(id);
      const evaluation = await this.api.evaluate(id);
      this.update({
        busy: false,
        revision: resp.revision,
        droppedAnnotations: resp.dropped_annotations,
        preRefineEvaluation: before,
        model: { data: model.model, revision: model.revision },
        evaluation: { data: evaluation, revision: evaluation.revision },
      });
    } catch (err) {
      this.fail(err);
    }
  }

  async undo(): Promise<void> {
    const id = this.requireSession();
    this.update({ busy: true });
    try {
      await this.api.undo(id, this.state.revision);
      await this.refreshFromServer();
      this.update({ busy: false, preRefineEvaluation: null });
    } catch (err) {
      this.fail(err);
    }
  }

  private requireSession(): string {
    if (!this.state.sessionId) throw new Error("no session loaded");
    return this.state.sessionId;
  }
}

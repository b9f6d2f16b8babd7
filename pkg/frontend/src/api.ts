/** Typed client for the workbench service.
 *
 * Every response's raw body is kept in a transport log so tests (and the
 * curious) can verify that displayed numbers are exactly what the service
 * sent. Mutations are never retried: a failure or conflict surfaces to the
 * caller untouched.
 */

import type {
  AnnotationPutBody,
  AnnotationPutResponse,
  DistributionDoc,
  EvaluateResponse,
  FocusResponse,
  ModelDoc,
  ModelResponse,
  PreviewResponse,
  RankResponse,
  RefineRequestBody,
  RevisionResponse,
  SessionCreated,
  SweepResponse,
} from "./types.js";

export interface TransportRecord {
  method: string;
  path: string;
  status: number;
  rawBody: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
    public diagnostics: string[] = [],
  ) {
    super(detail);
  }
}

export class ConflictError extends ApiError {
  constructor(detail: string, public serverRevision: number) {
    super(409, detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly transportLog: TransportRecord[] = [];

  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const raw = await response.text();
    this.transportLog.push({ method, path, status: response.status, rawBody: raw });
    let parsed: any = null;
    try {
      parsed = raw ? JSON.parse(raw) : null;
    } catch {
      throw new ApiError(response.status, `unparseable response from ${path}`);
    }
    if (!response.ok) {
      const detail =
        typeof parsed?.detail === "string" ? parsed.detail : JSON.stringify(parsed?.detail ?? raw);
      if (response.status === 409) {
        throw new ConflictError(detail, parsed?.revision ?? -1);
      }
      throw new ApiError(response.status, detail, parsed?.diagnostics ?? []);
    }
    return parsed as T;
  }

  createSession(model: ModelDoc): Promise<SessionCreated> {
    return this.request("POST", "/sessions", model);
  }

  getModel(sessionId: string): Promise<ModelResponse> {
    return this.request("GET", `/sessions/${sessionId}/model`);
  }

  evaluate(sessionId: string): Promise<EvaluateResponse> {
    return this.request("GET", `/sessions/${sessionId}/evaluate`);
  }

  putAnnotation(
    sessionId: string,
    ref: string,
    body: AnnotationPutBody,
  ): Promise<AnnotationPutResponse> {
    return this.request(
      "PUT",
      `/sessions/${sessionId}/annotations/${encodeURIComponent(ref)}`,
      body,
    );
  }

  focus(
    sessionId: string,
    cluster: string[],
    samples: number,
    seed: number,
    signal?: AbortSignal,
  ): Promise<FocusResponse> {
    return this.request("POST", `/sessions/${sessionId}/focus`, { cluster, samples, seed }, signal);
  }

  rank(sessionId: string, samples: number, seed: number, signal?: AbortSignal): Promise<RankResponse> {
    return this.request(
      "GET",
      `/sessions/${sessionId}/rank?samples=${samples}&seed=${seed}`,
      undefined,
      signal,
    );
  }

  sweep(sessionId: string, param: string, grid: number): Promise<SweepResponse> {
    return this.request("POST", `/sessions/${sessionId}/sweep`, { param, grid });
  }

  refine(sessionId: string, body: RefineRequestBody): Promise<RevisionResponse> {
    return this.request("POST", `/sessions/${sessionId}/refine`, body);
  }

  undo(sessionId: string, expectedRevision: number): Promise<RevisionResponse> {
    return this.request("POST", `/sessions/${sessionId}/undo`, {
      expected_revision: expectedRevision,
    });
  }

  preview(distribution: DistributionDoc, points = 201): Promise<PreviewResponse> {
    return this.request("POST", "/distributions/preview", { distribution, points });
  }
}

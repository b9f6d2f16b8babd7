/** A scripted stand-in for the workbench service, close enough to the
 * real payload shapes for transport-level tests. Every handler returns
 * plain objects; the recording fetch stub serializes them, so tests can
 * check displayed numbers against the literal response bytes. */

import type { ModelDoc } from "../src/types.js";

export const PRIOR_MODEL: ModelDoc = {
  chance: [
    {
      name: "Win",
      outcomes: ["yes", "no"],
      parents: [],
      table: { "": { yes: 0.5, no: 0.5 } },
    },
  ],
  decision: { name: "Gamble", alternatives: ["Bet", "Do-not-bet"] },
  utility: {
    relevant_vars: ["Win"],
    entries: {
      "Bet|Win=yes": 5000,
      "Bet|Win=no": -5000,
      "Do-not-bet|Win=yes": 0,
      "Do-not-bet|Win=no": 0,
    },
  },
  annotations: [],
};

export interface Scripted {
  status: number;
  body: unknown;
}

export type Script = (method: string, path: string, body: any) => Scripted;

/** Fetch replacement that runs a script and records every exchange. */
export function scriptedFetch(script: Script) {
  const calls: { method: string; path: string; body: any }[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://fake");
    const path = url.pathname + url.search;
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ method, path, body });
    if (init?.signal?.aborted) {
      const err = new Error("aborted");
      err.name = "AbortError";
      throw err;
    }
    const scripted = script(method, path, body);
    return new Response(JSON.stringify(scripted.body), {
      status: scripted.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

/** Happy-path script covering the elicitation walkthrough. */
export function walkthroughScript(): Script {
  let revision = 0;
  return (method, path, body) => {
    if (method === "POST" && path === "/sessions") {
      return { status: 201, body: { id: "s1", revision: 0 } };
    }
    if (path === "/sessions/s1/model") {
      return { status: 200, body: { revision, model: PRIOR_MODEL } };
    }
    if (path === "/sessions/s1/evaluate") {
      return {
        status: 200,
        body: {
          revision,
          optimal: "Bet",
          expected_utility: revision >= 2 ? 300.0000000000001 : 0.0,
          tie: revision < 2,
          expected_utilities: { Bet: revision >= 2 ? 300.0000000000001 : 0.0, "Do-not-bet": 0.0 },
          marginals: { Win: { yes: revision >= 2 ? 0.5300000000000007 : 0.5, no: revision >= 2 ? 0.47 : 0.5 } },
        },
      };
    }
    if (method === "PUT" && path.startsWith("/sessions/s1/annotations/")) {
      if (body.expected_revision !== revision) {
        return { status: 409, body: { detail: "expected revision mismatch", revision } };
      }
      revision += 1;
      return {
        status: 200,
        body: {
          revision,
          target: "p(Win=yes)",
          distribution: { family: "beta", alpha: 24.897160067210788, beta: 20.402989363795555 },
          mean: 0.5496043695204582,
          coherence_warning: {
            target: "p(Win=yes)",
            point_value: 0.5,
            distribution_mean: 0.5496043695204582,
            gap: 0.04960436952045822,
            threshold: 0.02,
          },
        },
      };
    }
    if (method === "POST" && path === "/sessions/s1/focus") {
      return {
        status: 200,
        body: {
          revision,
          cluster: body.cluster,
          vpi_estimate: 111.05656270678473,
          vpi_std_error: 0.8296662220950101,
          total_cost: 50.0,
          recommend: true,
          samples: body.samples,
          seed: body.seed,
          baseline_alternative: "Bet",
          baseline_convention: "second-order-mean",
        },
      };
    }
    if (method === "GET" && path.startsWith("/sessions/s1/rank")) {
      return {
        status: 200,
        body: {
          revision,
          ranking: [
            {
              param: "p(Win=yes)",
              report: {
                cluster: ["p(Win=yes)"],
                vpi_estimate: 110.9,
                vpi_std_error: 0.83,
                total_cost: 50.0,
                recommend: true,
                samples: 100000,
                seed: 0,
                baseline_alternative: "Bet",
                baseline_convention: "second-order-mean",
              },
            },
          ],
        },
      };
    }
    if (method === "POST" && path === "/sessions/s1/sweep") {
      return {
        status: 200,
        body: {
          revision,
          param: body.param,
          baseline_value: 0.5,
          grid: [0, 0.25, 0.5, 0.75, 1],
          series: { Bet: [-5000, -2500, 0, 2500, 5000], "Do-not-bet": [0, 0, 0, 0, 0] },
          crossings: [0.4999999997019768],
        },
      };
    }
    if (method === "POST" && path === "/sessions/s1/refine") {
      if (body.expected_revision !== revision) {
        return { status: 409, body: { detail: "expected revision mismatch", revision } };
      }
      revision += 1;
      return { status: 200, body: { revision, dropped_annotations: ["p(Win=yes)"] } };
    }
    if (method === "POST" && path === "/sessions/s1/undo") {
      if (body?.expected_revision !== undefined && body.expected_revision !== revision) {
        return { status: 409, body: { detail: "expected revision mismatch", revision } };
      }
      revision += 1;
      return { status: 200, body: { revision, dropped_annotations: [] } };
    }
    if (method === "POST" && path === "/distributions/preview") {
      return {
        status: 200,
        body: {
          xs: [0.3, 0.45, 0.55, 0.65, 0.8],
          cdf: [0.0, 0.08, 0.5, 0.93, 1.0],
          pdf: [0.01, 1.9, 5.4, 1.6, 0.02],
          mean: 0.5496043695204582,
          support: [0, 1],
        },
      };
    }
    return { status: 404, body: { detail: `no handler for ${method} ${path}` } };
  };
}

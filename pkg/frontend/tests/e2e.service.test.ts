/** End-to-end against the real workbench service.
 *
 * Spawns `voiwb serve` from the Python package, then drives the exact
 * flows a user performs: load the betting example, enter the 0.5/0.6
 * fractiles and the $50 cost, analyze (expect a refine recommendation),
 * extend the conversation with the full conditioning table (expect the
 * expected utility to move to $300), undo. Every number rendered comes
 * from the recorded transport bytes, compared bit-for-bit.
 *
 * Enabled when VOIWB_E2E=1 (the service binary must be importable):
 *   npm run test:e2e
 */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { money, num } from "../src/format.js";
import { WorkbenchStore } from "../src/store.js";
import { renderApp } from "../src/views.js";
import type { ChanceVariableDoc, ModelDoc } from "../src/types.js";

const PORT = 7499;
const BASE = `http://127.0.0.1:${PORT}`;
const MODELS = join(__dirname, "..", "..", "models");

const run = describe.skipIf(!process.env.VOIWB_E2E);

let server: ChildProcess | null = null;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      const resp = await fetch(`${BASE}/openapi.json`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
  throw new Error("service did not come up");
}

run("workbench against the live service", () => {
  beforeAll(async () => {
    server = spawn("voiwb", ["serve", "--port", String(PORT)], { stdio: "ignore" });
    await waitForService();
  }, 40_000);

  afterAll(() => {
    server?.kill();
  });

  it("walks the elicitation loop end to end", async () => {
    const api = new ApiClient(BASE);
    const store = new WorkbenchStore(api);
    const prior = JSON.parse(
      readFileSync(join(MODELS, "football_prior.json"), "utf-8"),
    ) as ModelDoc;
    prior.annotations = []; // enter the annotation through the UI flow instead

    await store.loadModel(prior);
    expect(store.state.revision).toBe(0);
    expect(store.state.evaluation!.data.tie).toBe(true); // flat prior: even bet

    // -- annotation editor flow: fractiles 0.5 / 0.6, cost 50
    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [
        { p: 0.25, q: "0.5" },
        { p: 0.75, q: "0.6" },
      ],
      scenario: "One hour extending the conversation before the deadline.",
      cost: "50",
    });
    await store.requestPreview();
    expect(store.state.preview!.xs.length).toBeGreaterThan(100);
    const putResp = await store.saveAnnotation();
    expect(putResp.coherence_warning).not.toBeNull(); // 0.5 stored vs ~0.55 expected

    const report = await store.analyze(["p(Win=yes)"], 100_000, 0);
    expect(report.recommend).toBe(true);
    expect(report.total_cost).toBe(50);
    expect(report.vpi_estimate).toBeGreaterThan(50);

    // dashboard renders the wire numbers verbatim
    let html = renderApp(store.state, null);
    const focusWire = JSON.parse(
      api.transportLog.filter((r) => r.path.endsWith("/focus")).at(-1)!.rawBody,
    );
    expect(store.state.focusReports[0]!.data.vpi_estimate).toBe(focusWire.vpi_estimate);
    expect(html).toContain(money(focusWire.vpi_estimate));
    expect(html).toContain(">refine<");

    // -- sensitivity: crossing at one half
    await store.runSweep("p(Win=yes)");
    const sweepWire = JSON.parse(
      api.transportLog.filter((r) => r.path.endsWith("/sweep")).at(-1)!.rawBody,
    );
    expect(store.state.sweep!.data.crossings).toEqual(sweepWire.crossings);
    expect(Math.abs(sweepWire.crossings[0] - 0.5)).toBeLessThanOrEqual(1e-6);

    // -- refine dialog flow: submit the full conditioning structure
    const extension = JSON.parse(
      readFileSync(join(MODELS, "football_extension.json"), "utf-8"),
    ) as { new_parents: ChanceVariableDoc[]; cpt: Record<string, Record<string, number>> };
    await store.runRefine("p(Win=yes)", extension.new_parents, extension.cpt);

    const evalWire = JSON.parse(
      api.transportLog.filter((r) => r.path.endsWith("/evaluate")).at(-1)!.rawBody,
    );
    expect(store.state.evaluation!.data.expected_utility).toBe(evalWire.expected_utility);
    expect(Math.abs(evalWire.expected_utility - 300)).toBeLessThanOrEqual(1e-9);
    expect(Math.abs(evalWire.marginals.Win.yes - 0.53)).toBeLessThanOrEqual(1e-9);
    expect(store.state.droppedAnnotations).toEqual(["p(Win=yes)"]);

    html = renderApp(store.state, null);
    expect(html).toContain(money(evalWire.expected_utility));
    expect(html).toContain(num(evalWire.marginals.Win.yes));
    expect(html).toContain('data-testid="compare"'); // before/after panel

    // -- undo control
    await store.undo();
    const backWire = JSON.parse(
      api.transportLog.filter((r) => r.path.endsWith("/evaluate")).at(-1)!.rawBody,
    );
    expect(backWire.marginals.Win.yes).toBe(0.5);
    expect(store.state.evaluation!.data.marginals.Win!.yes).toBe(0.5);
  }, 60_000);

  it("a concurrent edit turns into a refresh prompt, not an overwrite", async () => {
    const api = new ApiClient(BASE);
    const store = new WorkbenchStore(api);
    const prior = JSON.parse(
      readFileSync(join(MODELS, "football_prior.json"), "utf-8"),
    ) as ModelDoc;
    await store.loadModel(prior);

    // someone else mutates the session behind this client's back
    const rival = new ApiClient(BASE);
    await rival.putAnnotation(store.state.sessionId!, "p(Win=yes)", {
      scenario: "rival assessment",
      cost: 10,
      distribution: { family: "degenerate", value: 0.5 },
      expected_revision: 0,
    });

    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [
        { p: 0.25, q: "0.5" },
        { p: 0.75, q: "0.6" },
      ],
      scenario: "mine",
      cost: "50",
    });
    await expect(store.saveAnnotation()).rejects.toThrow();
    expect(store.state.conflict).not.toBeNull();
    const html = renderApp(store.state, null);
    expect(html).toContain("conflict-banner");
    const puts = api.transportLog.filter((r) => r.method === "PUT");
    expect(puts).toHaveLength(1); // no silent retry
    await store.refreshFromServer();
    expect(store.state.conflict).toBeNull();
    expect(store.state.revision).toBe(1);
  }, 30_000);
});

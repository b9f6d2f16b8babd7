// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { money, num } from "../src/format.js";
import { WorkbenchStore } from "../src/store.js";
import { renderApp, renderRefineDialog, type RefineDraft } from "../src/views.js";
import { PRIOR_MODEL, scriptedFetch, walkthroughScript } from "./fake_service.js";

async function walkthroughStore() {
  const { fetchFn } = scriptedFetch(walkthroughScript());
  const api = new ApiClient("http://fake", fetchFn);
  const store = new WorkbenchStore(api);
  await store.loadModel(PRIOR_MODEL);
  return { store, api };
}

function mount(html: string): HTMLElement {
  document.body.innerHTML = `<main id="app">${html}</main>`;
  return document.querySelector("#app")!;
}

describe("model view", () => {
  it("shows the optimal alternative and EU exactly as the service sent them", async () => {
    const { store, api } = await walkthroughStore();
    const root = mount(renderApp(store.state, null));
    const wire = JSON.parse(
      api.transportLog.find((r) => r.path.endsWith("/evaluate"))!.rawBody,
    );
    expect(root.querySelector('[data-testid="optimal"]')!.textContent).toBe(wire.optimal);
    expect(root.querySelector('[data-testid="optimal-eu"]')!.textContent).toBe(
      money(wire.expected_utility),
    );
    expect(
      root.querySelector('[data-marginal="Win=yes"]')!.textContent,
    ).toBe(num(wire.marginals.Win.yes));
  });

  it("marks results stale once the revision moves on", async () => {
    const { store } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [{ p: 0.25, q: "0.5" }, { p: 0.75, q: "0.6" }],
      scenario: "x",
      cost: "50",
    });
    await store.saveAnnotation(); // revision bumps to 1; evaluation is from 0
    const root = mount(renderApp(store.state, null));
    const badge = root.querySelector("#model-view .badge.stale");
    expect(badge).not.toBeNull();
    expect(badge!.textContent).toContain("rev 0");
  });
});

describe("focus dashboard", () => {
  it("renders recommend badge, value, and cost from the report", async () => {
    const { store, api } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [{ p: 0.25, q: "0.5" }, { p: 0.75, q: "0.6" }],
      scenario: "x",
      cost: "50",
    });
    await store.saveAnnotation();
    await store.analyze(["p(Win=yes)"], 100000, 0);
    const root = mount(renderApp(store.state, null));
    const wire = JSON.parse(api.transportLog.find((r) => r.path.endsWith("/focus"))!.rawBody);
    expect(root.querySelector('[data-testid="recommend-badge"]')!.textContent).toBe("refine");
    expect(root.querySelector('[data-testid="vpi"]')!.textContent).toBe(money(wire.vpi_estimate));
    expect(root.querySelector('[data-testid="cost"]')!.textContent).toBe(money(wire.total_cost));
    expect(root.querySelector('[data-bar="value"]')).not.toBeNull();
  });

  it("shows the cancel control while a run is in flight", async () => {
    const { store } = await walkthroughStore();
    store.state = { ...store.state, analysisRunning: true };
    const root = mount(renderApp(store.state, null));
    expect(root.querySelector('[data-testid="analysis-running"]')).not.toBeNull();
    expect(root.querySelector('[data-action="cancel-analysis"]')).not.toBeNull();
  });
});

describe("annotation editor", () => {
  it("renders the coherence warning with both numbers", async () => {
    const { store } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [{ p: 0.25, q: "0.5" }, { p: 0.75, q: "0.6" }],
      scenario: "x",
      cost: "50",
    });
    await store.saveAnnotation();
    const root = mount(renderApp(store.state, null));
    const warning = root.querySelector('[data-testid="coherence-warning"]')!;
    expect(warning.textContent).toContain(num(0.5496043695204582, 4));
    expect(warning.textContent).toContain(num(0.5, 4));
  });

  it("shows the density preview once the service tabulates it", async () => {
    const { store } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    store.setDraft({ fractiles: [{ p: 0.25, q: "0.5" }, { p: 0.75, q: "0.6" }] });
    await store.requestPreview();
    const root = mount(renderApp(store.state, null));
    const svg = root.querySelector("#annotation-editor svg");
    expect(svg).not.toBeNull();
    expect(svg!.getAttribute("aria-label")).toBe("fitted density preview");
  });
});

describe("sensitivity view", () => {
  it("plots crossings from the sweep response", async () => {
    const { store, api } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    await store.runSweep("p(Win=yes)");
    const root = mount(renderApp(store.state, null));
    const wire = JSON.parse(api.transportLog.find((r) => r.path.endsWith("/sweep"))!.rawBody);
    expect(root.querySelector('[data-testid="crossing"]')!.textContent).toBe(
      num(wire.crossings[0], 6),
    );
    expect(root.querySelector(`[data-crossing="${wire.crossings[0]}"]`)).not.toBeNull();
  });
});

describe("refine dialog", () => {
  it("shows a live row-sum residual for the conditional table", async () => {
    const { store } = await walkthroughStore();
    const draft: RefineDraft = {
      target: "Win",
      parents: [{ name: "Field", outcomes: ["dry", "wet"], prior: ["0.7", "0.3"] }],
      cpt: {
        "Field=dry": ["0.56", "0.44"],
        "Field=wet": ["0.46", "0.14"], // off by 0.4
      },
    };
    const root = mount(renderRefineDialog(store.state, draft));
    const residuals = [...root.querySelectorAll('[data-testid="residual"]')].map(
      (el) => el.className,
    );
    // parent prior sums to 1 (ok), first row ok, second row flagged
    expect(residuals.filter((c) => c.includes("ok"))).toHaveLength(2);
    expect(residuals.filter((c) => c.includes("off"))).toHaveLength(1);
  });
});

describe("conflict banner", () => {
  it("offers a reload, never a silent overwrite", async () => {
    const { store } = await walkthroughStore();
    store.state = {
      ...store.state,
      conflict: { message: "expected revision 0, session is at 3", serverRevision: 3 },
    };
    const root = mount(renderApp(store.state, null));
    const banner = root.querySelector('[data-testid="conflict-banner"]')!;
    expect(banner.textContent).toContain("revision 3");
    expect(banner.querySelector('[data-action="refresh"]')).not.toBeNull();
  });
});

describe("undo control", () => {
  it("shows the before/after comparison following a refinement", async () => {
    const { store } = await walkthroughStore();
    store.selectParam("p(Win=yes)");
    store.setDraft({
      fractiles: [{ p: 0.25, q: "0.5" }, { p: 0.75, q: "0.6" }],
      scenario: "x",
      cost: "50",
    });
    await store.saveAnnotation();
    await store.runRefine("p(Win=yes)", [], {});
    const root = mount(renderApp(store.state, null));
    expect(root.querySelector('[data-testid="eu-before"]')!.textContent).toBe(money(0.0));
    expect(root.querySelector('[data-testid="eu-after"]')!.textContent).toBe(
      money(300.0000000000001),
    );
    expect(root.querySelector('[data-testid="revision"]')!.textContent).toBe("2");
  });
});

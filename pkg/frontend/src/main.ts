/** DOM wiring: one store, one render pass per state change, event
 * delegation by data-action attributes. */

import { ApiClient } from "./api.js";
import { WorkbenchStore } from "./store.js";
import { renderApp, type RefineDraft } from "./views.js";
import type { ChanceVariableDoc, ModelDoc } from "./types.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:7431";

const store = new WorkbenchStore(new ApiClient(SERVICE_URL));
let refineDraft: RefineDraft | null = null;

const root = document.querySelector<HTMLElement>("#app")!;

function render(): void {
  root.innerHTML = renderApp(store.state, refineDraft);
}

store.subscribe(render);
render();

document.querySelector<HTMLInputElement>("#model-file")!.addEventListener("change", async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const doc = JSON.parse(await file.text()) as ModelDoc;
  refineDraft = null;
  await store.loadModel(doc).catch(() => {});
});

document.querySelector<HTMLButtonElement>("#load-example")!.addEventListener("click", async () => {
  const response = await fetch("../models/football_prior.json");
  refineDraft = null;
  await store.loadModel((await response.json()) as ModelDoc).catch(() => {});
});

function intInput(id: string, fallback: number): number {
  const el = root.querySelector<HTMLInputElement>(`#${id}`);
  const value = el ? parseInt(el.value, 10) : NaN;
  return Number.isFinite(value) ? value : fallback;
}

root.addEventListener("input", (ev) => {
  const el = ev.target as HTMLElement;
  const action = el.dataset.action;
  if (!action) return;
  const value = (el as HTMLInputElement).value;
  if (action === "fractile") {
    const index = Number(el.dataset.index);
    const fractiles = store.state.draft.fractiles.map((f, i) =>
      i === index ? { ...f, q: value } : f,
    );
    store.setDraft({ fractiles });
    void store.requestPreview().catch(() => {});
  } else if (action === "scenario") {
    store.setDraft({ scenario: value });
  } else if (action === "cost") {
    store.setDraft({ cost: value });
  } else if (action === "parent-prior" && refineDraft) {
    const parent = refineDraft.parents[Number(el.dataset.parent)]!;
    parent.prior[Number(el.dataset.outcome)] = value;
    render();
    restoreFocus(el);
  } else if (action === "cpt-cell" && refineDraft) {
    const key = el.dataset.key!;
    const row = refineDraft.cpt[key] ?? [];
    row[Number(el.dataset.outcome)] = value;
    refineDraft.cpt[key] = row;
    render();
    restoreFocus(el);
  }
});

function restoreFocus(prototype: HTMLElement): void {
  const selector = Object.entries(prototype.dataset)
    .map(([k, v]) => `[data-${k.replace(/[A-Z]/g, (m) => "-" + m.toLowerCase())}="${v}"]`)
    .join("");
  const el = root.querySelector<HTMLInputElement>(selector);
  if (el) {
    el.focus();
    el.setSelectionRange(el.value.length, el.value.length);
  }
}

root.addEventListener("click", (ev) => {
  const el = (ev.target as HTMLElement).closest<HTMLElement>("[data-action]");
  if (!el) return;
  const action = el.dataset.action;
  void handleAction(action!, el).catch(() => {});
});

async function handleAction(action: string, el: HTMLElement): Promise<void> {
  switch (action) {
    case "refresh":
      await store.refreshFromServer();
      break;
    case "dismiss-error":
      store.dismissError();
      break;
    case "select-param":
      store.selectParam(el.dataset.ref ?? null);
      break;
    case "save-annotation":
      await store.saveAnnotation();
      break;
    case "analyze": {
      const ref = store.state.selectedParam;
      if (!ref) return;
      await store.analyze([ref], intInput("focus-samples", 100_000), intInput("focus-seed", 0));
      break;
    }
    case "cancel-analysis":
      store.cancelAnalysis();
      break;
    case "rank-all":
      await store.runRank(intInput("focus-samples", 100_000), intInput("focus-seed", 0));
      break;
    case "run-sweep":
      if (store.state.selectedParam) await store.runSweep(store.state.selectedParam);
      break;
    case "start-refine": {
      const select = root.querySelector<HTMLSelectElement>("#refine-target");
      if (!select || !select.value) return;
      refineDraft = { target: select.value, parents: [], cpt: {} };
      addParent();
      render();
      break;
    }
    case "add-parent":
      addParent();
      render();
      break;
    case "cancel-refine":
      refineDraft = null;
      render();
      break;
    case "submit-refine":
      await submitRefine();
      break;
    case "undo":
      await store.undo();
      break;
  }
}

function addParent(): void {
  if (!refineDraft) return;
  const name = window.prompt("Conditioning variable name?");
  if (!name) return;
  const outcomesText = window.prompt("Outcomes (comma-separated)?", "yes,no");
  if (!outcomesText) return;
  const outcomes = outcomesText.split(",").map((s) => s.trim()).filter(Boolean);
  refineDraft.parents.push({ name, outcomes, prior: outcomes.map(() => "") });
  refineDraft.cpt = {};
}

async function submitRefine(): Promise<void> {
  if (!refineDraft) return;
  const target = store.state.model?.data.chance.find((v) => v.name === refineDraft!.target);
  if (!target) return;
  const parents: ChanceVariableDoc[] = refineDraft.parents.map((p) => ({
    name: p.name,
    outcomes: p.outcomes,
    parents: [],
    table: { "": Object.fromEntries(p.outcomes.map((o, i) => [o, Number(p.prior[i])])) },
  }));
  const cpt: Record<string, Record<string, number>> = {};
  for (const [key, values] of Object.entries(refineDraft.cpt)) {
    cpt[key] = Object.fromEntries(target.outcomes.map((o, i) => [o, Number(values[i])]));
  }
  await store.runRefine(`p(${target.name}=${target.outcomes[0]})`, parents, cpt);
  refineDraft = null;
  render();
}

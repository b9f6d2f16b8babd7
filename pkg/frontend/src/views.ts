/** The six workbench panels as pure render functions over store state.
 * Handlers are attached by main.ts through data-action attributes, so
 * everything here is testable as strings (plus happy-dom for wiring). */

import { densityPreviewSvg, sweepSvg, valueCostBarSvg } from "./charts.js";
import { escapeHtml, money, num, prob, rowResidual } from "./format.js";
import { isStale, type Stamped, type WorkbenchState } from "./store.js";
import type { FocusReportDoc } from "./types.js";

function staleBadge(state: WorkbenchState, stamped: Stamped<unknown> | null): string {
  if (!stamped) return "";
  if (!isStale(state, stamped)) {
    return `<span class="badge fresh" title="computed at the current revision">rev ${stamped.revision}</span>`;
  }
  return `<span class="badge stale" title="the model changed after this was computed">stale: rev ${stamped.revision} &ne; ${state.revision}</span>`;
}

export function renderConflictBanner(state: WorkbenchState): string {
  if (!state.conflict) return "";
  return (
    `<div class="banner conflict" data-testid="conflict-banner">` +
    `The session moved to revision ${state.conflict.serverRevision} under you: ` +
    `${escapeHtml(state.conflict.message)}. Nothing was overwritten. ` +
    `<button data-action="refresh">Reload latest model</button>` +
    `</div>`
  );
}

export function renderErrorBanner(state: WorkbenchState): string {
  if (!state.error) return "";
  const items = state.error.diagnostics.map((d) => `<li>${escapeHtml(d)}</li>`).join("");
  return (
    `<div class="banner error" data-testid="error-banner">` +
    `${escapeHtml(state.error.message)}` +
    (items ? `<ul>${items}</ul>` : "") +
    `<button data-action="dismiss-error">Dismiss</button>` +
    `</div>`
  );
}

export function renderModelView(state: WorkbenchState): string {
  if (!state.model || !state.evaluation) {
    return `<section class="panel" id="model-view"><h2>Model</h2><p>Load a model file to begin.</p></section>`;
  }
  const doc = state.model.data;
  const ev = state.evaluation.data;
  const variables = doc.chance
    .map((v) => {
      const rows = Object.entries(v.table)
        .map(([key, row]) => {
          const cells = v.outcomes
            .map((o) => {
              const ref = key
                ? `p(${v.name}=${o} | ${key.split(",").join(", ")})`
                : `p(${v.name}=${o})`;
              return (
                `<td><button class="ref" data-action="select-param" data-ref="${escapeHtml(ref)}">` +
                `${prob(row[o]!)}</button></td>`
              );
            })
            .join("");
          return `<tr><th>${escapeHtml(key || "—")}</th>${cells}</tr>`;
        })
        .join("");
      const header = v.outcomes.map((o) => `<th>${escapeHtml(o)}</th>`).join("");
      const parents = v.parents.length ? ` | ${v.parents.join(", ")}` : "";
      return (
        `<details open class="variable"><summary>${escapeHtml(v.name)}${escapeHtml(parents)}</summary>` +
        `<table><thead><tr><th></th>${header}</tr></thead><tbody>${rows}</tbody></table></details>`
      );
    })
    .join("");
  const eus = Object.entries(ev.expected_utilities)
    .map(
      ([alt, eu]) =>
        `<li${alt === ev.optimal ? ' class="optimal"' : ""}>${escapeHtml(alt)}: ` +
        `<span data-testid="eu-${escapeHtml(alt)}">${money(eu)}</span></li>`,
    )
    .join("");
  const marginals = Object.entries(ev.marginals)
    .map(
      ([name, dist]) =>
        `<li>${escapeHtml(name)}: ${Object.entries(dist)
          .map(([o, p]) => `${escapeHtml(o)} <span data-marginal="${escapeHtml(name)}=${escapeHtml(o)}">${prob(p)}</span>`)
          .join(", ")}</li>`,
    )
    .join("");
  return (
    `<section class="panel" id="model-view"><h2>Model ${staleBadge(state, state.evaluation)}</h2>` +
    `<div class="columns"><div>${variables}</div>` +
    `<div><h3>Decision: ${escapeHtml(doc.decision.name)}</h3><ul class="eu-list">${eus}</ul>` +
    `<p class="headline">Best now: <strong data-testid="optimal">${escapeHtml(ev.optimal)}</strong> at ` +
    `<strong data-testid="optimal-eu">${money(ev.expected_utility)}</strong>` +
    `${ev.tie ? ' <span class="badge stale">tie</span>' : ""}</p>` +
    `<h3>Marginals</h3><ul>${marginals}</ul></div></div></section>`
  );
}

export function renderAnnotationEditor(state: WorkbenchState): string {
  const ref = state.selectedParam;
  const body = !ref
    ? `<p>Pick a probability in the model view to describe your confidence in it.</p>`
    : annotationForm(state, ref);
  return `<section class="panel" id="annotation-editor"><h2>Assessment scenario</h2>${body}</section>`;
}

function annotationForm(state: WorkbenchState, ref: string): string {
  const d = state.draft;
  const fr = d.fractiles
    .map(
      (f, i) =>
        `<label>${Math.round(f.p * 100)}% fractile ` +
        `<input data-action="fractile" data-index="${i}" value="${escapeHtml(f.q)}" inputmode="decimal"/></label>`,
    )
    .join("");
  const preview = state.preview
    ? densityPreviewSvg(state.preview)
    : `<p class="hint">Enter two increasing quantiles in (0, 1) to see the fitted shape.</p>`;
  const coherence = state.coherence
    ? `<p class="banner warn" data-testid="coherence-warning">After assessment this parameter is expected at ` +
      `${num(state.coherence.distribution_mean, 4)}, but the model currently says ` +
      `${num(state.coherence.point_value, 4)} (gap ${num(state.coherence.gap, 3)} &gt; ` +
      `${num(state.coherence.threshold, 3)}). Consider updating the point value too.</p>`
    : "";
  return (
    `<p>Target: <code data-testid="selected-param">${escapeHtml(ref)}</code></p>` +
    `<div class="fractiles">${fr}</div>` +
    `<label>Scenario <textarea data-action="scenario" rows="2">${escapeHtml(d.scenario)}</textarea></label>` +
    `<label>Expected cost ($) <input data-action="cost" value="${escapeHtml(d.cost)}" inputmode="decimal"/></label>` +
    `<div class="preview">${preview}</div>` +
    coherence +
    `<button data-action="save-annotation" ${state.busy ? "disabled" : ""}>Save annotation</button>`
  );
}

export function renderFocusDashboard(state: WorkbenchState): string {
  const running = state.analysisRunning
    ? `<p class="running" data-testid="analysis-running">Monte Carlo run in progress… ` +
      `<button data-action="cancel-analysis">Cancel</button></p>`
    : "";
  const controls =
    `<div class="controls">` +
    `<label>samples <input id="focus-samples" value="100000" inputmode="numeric"/></label>` +
    `<label>seed <input id="focus-seed" value="0" inputmode="numeric"/></label>` +
    `<button data-action="analyze" ${state.analysisRunning ? "disabled" : ""}>Analyze selected</button>` +
    `<button data-action="rank-all" ${state.analysisRunning ? "disabled" : ""}>Rank all annotated</button>` +
    `</div>`;
  const rankRows = state.ranking
    ? state.ranking.data.ranking.map((entry) => focusRow(entry.param, entry.report)).join("")
    : "";
  const rankTable = state.ranking
    ? `<h3>Ranking ${staleBadge(state, state.ranking)}</h3><table class="focus-table"><tbody>${rankRows}</tbody></table>`
    : "";
  const reports = state.focusReports
    .map(
      (r) =>
        `<div class="focus-report" data-testid="focus-report">` +
        focusRow(r.data.cluster.join(", "), r.data) +
        `<p class="meta">${r.data.samples} samples, seed ${r.data.seed}, std error ` +
        `${num(r.data.vpi_std_error, 4)}, baseline ${escapeHtml(r.data.baseline_alternative)} ` +
        `(${escapeHtml(r.data.baseline_convention)}) ${staleBadge(state, r)}</p></div>`,
    )
    .join("");
  return (
    `<section class="panel" id="focus-dashboard"><h2>Where to spend assessment effort</h2>` +
    controls +
    running +
    rankTable +
    reports +
    `</section>`
  );
}

function focusRow(label: string, report: FocusReportDoc): string {
  const scale = Math.max(report.vpi_estimate, report.total_cost);
  const badge = report.recommend
    ? `<span class="badge go" data-testid="recommend-badge">refine</span>`
    : `<span class="badge no" data-testid="recommend-badge">not worth it</span>`;
  return (
    `<tr><td><code>${escapeHtml(label)}</code></td>` +
    `<td>value <span data-testid="vpi">${money(report.vpi_estimate)}</span> vs cost ` +
    `<span data-testid="cost">${money(report.total_cost)}</span></td>` +
    `<td>${valueCostBarSvg(report.vpi_estimate, report.total_cost, scale)}</td>` +
    `<td>${badge}</td></tr>`
  );
}

export function renderSensitivityView(state: WorkbenchState): string {
  const controls =
    `<div class="controls"><button data-action="run-sweep" ${state.selectedParam ? "" : "disabled"}>` +
    `Sweep selected parameter</button></div>`;
  const body = state.sweep
    ? `<p><code>${escapeHtml(state.sweep.data.param)}</code> ${staleBadge(state, state.sweep)}</p>` +
      sweepSvg(state.sweep.data) +
      (state.sweep.data.crossings.length
        ? `<p>Decision flips at ${state.sweep.data.crossings
            .map((c) => `<strong data-testid="crossing">${num(c, 6)}</strong>`)
            .join(", ")}.</p>`
        : `<p>No decision reversal anywhere in the range.</p>`)
    : `<p class="hint">Sweep a parameter to see how each alternative's expected utility moves.</p>`;
  return `<section class="panel" id="sensitivity-view"><h2>One-way sensitivity</h2>${controls}${body}</section>`;
}

export interface RefineDraft {
  target: string;
  parents: { name: string; outcomes: string[]; prior: string[] }[];
  cpt: Record<string, string[]>; // parent assignment key -> per-outcome entries as typed
}

export function renderRefineDialog(
  state: WorkbenchState,
  draft: RefineDraft | null,
): string {
  if (!state.model) return "";
  if (!draft) {
    const parentless = state.model.data.chance.filter((v) => v.parents.length === 0);
    const options = parentless
      .map((v) => `<option value="${escapeHtml(v.name)}">${escapeHtml(v.name)}</option>`)
      .join("");
    return (
      `<section class="panel" id="refine-dialog"><h2>Extend the conversation</h2>` +
      `<p>Condition a directly assessed variable on the events it hinges on.</p>` +
      `<label>Variable <select id="refine-target">${options}</select></label>` +
      `<button data-action="start-refine">Set up conditioning table…</button></section>`
    );
  }
  const target = state.model.data.chance.find((v) => v.name === draft.target)!;
  const parentBlocks = draft.parents
    .map((p, pi) => {
      const outs = p.outcomes
        .map(
          (o, oi) =>
            `<label>p(${escapeHtml(p.name)}=${escapeHtml(o)}) ` +
            `<input data-action="parent-prior" data-parent="${pi}" data-outcome="${oi}" ` +
            `value="${escapeHtml(p.prior[oi] ?? "")}" inputmode="decimal"/></label>`,
        )
        .join("");
      const residual = residualIndicator(p.prior);
      return `<fieldset><legend>${escapeHtml(p.name)}</legend>${outs}${residual}</fieldset>`;
    })
    .join("");
  const keys = cartesianKeys(draft.parents);
  const grid = keys
    .map((key) => {
      const cells = target.outcomes
        .map(
          (o, oi) =>
            `<td><input data-action="cpt-cell" data-key="${escapeHtml(key)}" data-outcome="${oi}" ` +
            `value="${escapeHtml(draft.cpt[key]?.[oi] ?? "")}" inputmode="decimal"/></td>`,
        )
        .join("");
      return `<tr><th>${escapeHtml(key)}</th>${cells}${residualCell(draft.cpt[key] ?? [])}</tr>`;
    })
    .join("");
  const header = target.outcomes.map((o) => `<th>${escapeHtml(o)}</th>`).join("");
  return (
    `<section class="panel" id="refine-dialog"><h2>Extend the conversation: ${escapeHtml(draft.target)}</h2>` +
    `<h3>New conditioning variables</h3>${parentBlocks}` +
    `<button data-action="add-parent">Add conditioning variable…</button>` +
    `<h3>Conditional table for ${escapeHtml(draft.target)}</h3>` +
    `<table class="cpt-grid"><thead><tr><th></th>${header}<th>row sum</th></tr></thead><tbody>${grid}</tbody></table>` +
    `<button data-action="submit-refine" ${state.busy ? "disabled" : ""}>Refine model</button> ` +
    `<button data-action="cancel-refine">Discard</button></section>`
  );
}

function cartesianKeys(parents: { name: string; outcomes: string[] }[]): string[] {
  let keys: string[][] = [[]];
  for (const p of parents) {
    keys = keys.flatMap((prefix) => p.outcomes.map((o) => [...prefix, `${p.name}=${o}`]));
  }
  return keys.map((parts) => parts.join(","));
}

function residualIndicator(values: string[]): string {
  const nums = values.map(Number);
  if (nums.some((v) => !Number.isFinite(v))) return `<span class="residual">…</span>`;
  const res = rowResidual(nums);
  const cls = Math.abs(res) <= 1e-6 ? "ok" : "off";
  return `<span class="residual ${cls}" data-testid="residual">sum &minus; 1 = ${num(res, 3)}</span>`;
}

function residualCell(values: string[]): string {
  return `<td>${residualIndicator(values)}</td>`;
}

export function renderUndoControl(state: WorkbenchState): string {
  const dropped = state.droppedAnnotations.length
    ? `<p class="hint">Refinement retired annotations: ${state.droppedAnnotations
        .map((d) => `<code>${escapeHtml(d)}</code>`)
        .join(", ")}</p>`
    : "";
  const sideBySide =
    state.preRefineEvaluation && state.evaluation
      ? `<table class="compare" data-testid="compare"><thead><tr><th></th><th>before</th><th>after</th></tr></thead>` +
        `<tbody><tr><th>best alternative</th>` +
        `<td>${escapeHtml(state.preRefineEvaluation.data.optimal)}</td>` +
        `<td>${escapeHtml(state.evaluation.data.optimal)}</td></tr>` +
        `<tr><th>expected utility</th>` +
        `<td data-testid="eu-before">${money(state.preRefineEvaluation.data.expected_utility)}</td>` +
        `<td data-testid="eu-after">${money(state.evaluation.data.expected_utility)}</td></tr></tbody></table>`
      : "";
  return (
    `<section class="panel" id="undo-control"><h2>History</h2>` +
    `<p>Session revision <strong data-testid="revision">${state.revision}</strong></p>` +
    dropped +
    sideBySide +
    `<button data-action="undo" ${state.busy || state.revision < 1 ? "disabled" : ""}>Undo last change</button>` +
    `</section>`
  );
}

export function renderApp(state: WorkbenchState, refineDraft: RefineDraft | null): string {
  return (
    renderConflictBanner(state) +
    renderErrorBanner(state) +
    renderModelView(state) +
    renderAnnotationEditor(state) +
    renderFocusDashboard(state) +
    renderSensitivityView(state) +
    renderRefineDialog(state, refineDraft) +
    renderUndoControl(state)
  );
}

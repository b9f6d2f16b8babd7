/** Display formatting. The only arithmetic allowed client-side is
 * presentation: rounding for display, scaling for chart layout, and the
 * CPT editor's live row-sum residual (an input aid, not a model value). */

export function num(x: number, digits = 6): string {
  if (Number.isInteger(x)) return x.toString();
  const rounded = Number(x.toPrecision(digits));
  return rounded.toString();
}

export function money(x: number): string {
  const sign = x < 0 ? "-" : "";
  const ax = Math.abs(x);
  const text = ax >= 100 ? ax.toFixed(0) : ax >= 1 ? ax.toFixed(2) : ax.toPrecision(3);
  return `${sign}$${text}`;
}

export function prob(x: number): string {
  return num(x, 6);
}

/** Live residual for one CPT row while the user types. */
export function rowResidual(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) - 1.0;
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

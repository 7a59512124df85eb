/*
 * Shared DOM helpers. Result cells show the term value exactly as the
 * service sent it: no client-side number formatting or rounding, so every
 * displayed value appears verbatim in the JSON payload.
 */

import type { ColumnInfo, ResultRow, TermCell } from "./api.js";

export function cellText(cell: TermCell | undefined): string {
  if (!cell) {
    return "";
  }
  return cell.value;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

/** Render a result table; tooltip columns get a title attribute. */
export function resultTable(
  vars: string[],
  rows: ResultRow[],
  columns: ColumnInfo[] = [],
): HTMLTableElement {
  const tooltip = new Map(columns.map((c) => [c.var, c]));
  const table = el("table", { class: "result-table" });
  const head = el("tr");
  for (const name of vars) {
    const th = el("th", {}, name);
    const info = tooltip.get(name);
    if (info) {
      th.title = `${info.label}: ${info.definition} [${info.terminology}]`;
      th.dataset.qname = info.qname;
    }
    head.appendChild(th);
  }
  const thead = el("thead");
  thead.appendChild(head);
  table.appendChild(thead);
  const body = el("tbody");
  for (const row of rows) {
    const tr = el("tr");
    for (const name of vars) {
      tr.appendChild(el("td", {}, cellText(row[name])));
    }
    body.appendChild(tr);
  }
  table.appendChild(body);
  return table;
}

export function errorBanner(message: string): HTMLElement {
  return el("div", { class: "error-banner", role: "alert" }, message);
}

/*
 * Page wiring: builds the three panels against a live service and keeps
 * them updated without full-page refreshes. Each panel owns its state and
 * re-renders into its mount point; staleness guards inside the panels drop
 * superseded responses.
 */

import { ApiClient } from "./api.js";
import { CrossSpeciesPanel } from "./crossSpecies.js";
import { QueryPanel } from "./queryPanel.js";
import { SubjectsView } from "./subjects.js";
import { TooltipCache } from "./tooltips.js";
import { el, errorBanner } from "./render.js";

export function saveViaAnchor(name: string, bytes: Uint8Array): void {
  const blob = new Blob([bytes.slice().buffer as ArrayBuffer], { type: "text/csv" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
}

export async function boot(root: HTMLElement, base = ""): Promise<{
  subjects: SubjectsView;
  queries: QueryPanel;
  crossSpecies: CrossSpeciesPanel;
  tooltips: TooltipCache;
}> {
  const api = new ApiClient(base);
  const subjects = new SubjectsView(api, saveViaAnchor);
  const queries = new QueryPanel(api);
  const crossSpecies = new CrossSpeciesPanel(api);
  const tooltips = new TooltipCache(api);

  const subjectsMount = el("section", { id: "subjects-panel" });
  const queryMount = el("section", { id: "query-panel" });
  const crossMount = el("section", { id: "cross-species-panel" });
  root.replaceChildren(subjectsMount, queryMount, crossMount);

  try {
    subjects.load(await api.subjects());
    subjects.render(subjectsMount);
  } catch (err) {
    subjectsMount.replaceChildren(
      errorBanner(`could not load subjects: ${(err as Error).message}`),
    );
  }

  try {
    await queries.loadTemplates();
    const menu = el("select", { id: "template-menu" });
    for (const template of queries.templates) {
      menu.appendChild(el("option", { value: template.id }, `${template.model}: ${template.id}`));
    }
    const runButton = el("button", {}, "Run");
    const results = el("div", { class: "query-results" });
    runButton.addEventListener("click", () => {
      const id = (menu as HTMLSelectElement).value;
      void queries.runTemplate(id, {}).then(() => queries.render(results));
    });
    queryMount.replaceChildren(menu, runButton, results);
  } catch (err) {
    queryMount.replaceChildren(errorBanner(`could not load templates: ${(err as Error).message}`));
  }

  try {
    await crossSpecies.loadMaps();
    const results = el("div", { class: "cross-species-results" });
    const runButton = el("button", {}, "Find equivalents");
    runButton.addEventListener("click", () => {
      void crossSpecies.run().then(() => crossSpecies.render(results));
    });
    crossMount.replaceChildren(runButton, results);
    crossSpecies.render(results);
  } catch (err) {
    crossMount.replaceChildren(errorBanner(`could not load maps: ${(err as Error).message}`));
  }

  return { subjects, queries, crossSpecies, tooltips };
}

/*
 * Cross-species equivalence explorer: pick a registered mapping function
 * (shown with its citation), set a tolerance, and list the matched subject
 * pairs. Tolerance must be >= 0; the selector only ever offers maps the
 * service registered.
 */

import { ApiClient, EquivalencePair, MapInfo } from "./api.js";
import { el, errorBanner } from "./render.js";
import { LatestOnly } from "./staleness.js";

export class CrossSpeciesPanel {
  maps: MapInfo[] = [];
  selectedMap: string | null = null;
  tolerance = 0;
  pairs: EquivalencePair[] = [];

  private latest = new LatestOnly();

  constructor(private api: ApiClient) {}

  async loadMaps(): Promise<void> {
    this.maps = (await this.api.maps()).maps;
    if (this.maps.length && this.selectedMap === null) {
      this.selectedMap = this.maps[0].name;
    }
  }

  setTolerance(value: number): void {
    if (!(value >= 0)) {
      throw new Error(`tolerance must be >= 0, got ${value}`);
    }
    this.tolerance = value;
  }

  async run(): Promise<void> {
    if (this.selectedMap === null) {
      throw new Error("no mapping function selected");
    }
    await this.latest.run(
      () => this.api.crossSpecies(this.selectedMap as string, this.tolerance),
      (result) => {
        this.pairs = result.pairs;
      },
    );
  }

  render(container: HTMLElement): void {
    container.replaceChildren();
    const selector = el("select", { class: "map-select" });
    for (const map of this.maps) {
      const option = el(
        "option",
        { value: map.name, title: map.citation },
        `${map.name} (${map.from_species} -> ${map.to_species}) — ${map.citation}`,
      );
      if (map.name === this.selectedMap) {
        option.setAttribute("selected", "");
      }
      selector.appendChild(option);
    }
    selector.addEventListener("change", () => {
      this.selectedMap = (selector as HTMLSelectElement).value;
    });
    container.appendChild(selector);

    const tolerance = el("input", {
      type: "number",
      min: "0",
      step: "0.1",
      value: String(this.tolerance),
      class: "tolerance",
    });
    tolerance.addEventListener("change", () => {
      const value = Number((tolerance as HTMLInputElement).value);
      try {
        this.setTolerance(value);
      } catch (err) {
        container.prepend(errorBanner((err as Error).message));
        (tolerance as HTMLInputElement).value = String(this.tolerance);
      }
    });
    container.appendChild(tolerance);

    if (!this.pairs.length) {
      container.appendChild(el("p", { class: "empty-state" }, "No equivalent pairs."));
      return;
    }
    const table = el("table", { class: "pairs-table" });
    const head = el("tr");
    for (const title of ["subject", "age", "mapped age", "matched subject", "age"]) {
      head.appendChild(el("th", {}, title));
    }
    const thead = el("thead");
    thead.appendChild(head);
    table.appendChild(thead);
    const body = el("tbody");
    for (const pair of this.pairs) {
      const tr = el("tr");
      tr.appendChild(el("td", {}, pair.from_subject));
      tr.appendChild(el("td", {}, `${pair.from_age} ${pair.from_units}`));
      tr.appendChild(el("td", {}, `${pair.mapped_age} ${pair.mapped_units}`));
      tr.appendChild(el("td", {}, pair.to_subject));
      tr.appendChild(el("td", {}, `${pair.to_age} ${pair.to_units}`));
      body.appendChild(tr);
    }
    table.appendChild(body);
    container.appendChild(table);
  }
}

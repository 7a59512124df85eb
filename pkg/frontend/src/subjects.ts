/*
 * "Show Subjects" panel: the union of all subjects across species, with
 * per-row checkboxes and data-type filters driving the CSV download. The
 * download button is enabled exactly when at least one row is checked and
 * at least one data type is selected; the saved file is byte-identical to
 * the service's /export response for the same selection.
 */

import { ApiClient, SubjectsResponse, SubjectRow } from "./api.js";
import { el, errorBanner } from "./render.js";

export type SaveFile = (name: string, bytes: Uint8Array) => void;

export const DATA_TYPES = ["demographics", "roi-statistics", "heart-rate"];

export class SubjectsView {
  rows: SubjectRow[] = [];
  checked = new Set<string>();
  activeTypes = new Set<string>();

  constructor(
    private api: ApiClient,
    private save: SaveFile,
  ) {}

  /** Validate and adopt a /subjects response; rejects malformed payloads whole. */
  load(response: SubjectsResponse): void {
    if (!response || !Array.isArray(response.subjects)) {
      throw new Error("malformed /subjects response");
    }
    for (const row of response.subjects) {
      if (typeof row.id !== "string" || typeof row.species !== "string"
          || !Array.isArray(row.data_types) || !Array.isArray(row.ages)) {
        throw new Error("malformed subject row");
      }
    }
    this.rows = response.subjects;
    this.checked.clear();
  }

  downloadEnabled(): boolean {
    return this.checked.size > 0 && this.activeTypes.size > 0;
  }

  selection(): { subjects: string[]; data_types: string[] } {
    return {
      subjects: [...this.checked].sort(),
      data_types: [...this.activeTypes].sort(),
    };
  }

  /** POST /export for the current selection and save the bytes unchanged. */
  async download(): Promise<Uint8Array | null> {
    if (!this.downloadEnabled()) {
      return null; // button is disabled; never issue a request
    }
    const bytes = await this.api.exportCsv({ selection: this.selection() });
    this.save("export.csv", bytes);
    return bytes;
  }

  render(container: HTMLElement): void {
    container.replaceChildren();
    const controls = el("div", { class: "subjects-controls" });
    for (const dataType of DATA_TYPES) {
      const label = el("label", {}, ` ${dataType}`);
      const box = el("input", { type: "checkbox", "data-type": dataType });
      (box as HTMLInputElement).checked = this.activeTypes.has(dataType);
      box.addEventListener("change", () => {
        if ((box as HTMLInputElement).checked) {
          this.activeTypes.add(dataType);
        } else {
          this.activeTypes.delete(dataType);
        }
        this.syncButton(container);
      });
      label.prepend(box);
      controls.appendChild(label);
    }
    const button = el("button", { class: "download", disabled: "" }, "Download CSV");
    button.addEventListener("click", () => {
      void this.download().catch((err) => {
        container.prepend(errorBanner(`download failed: ${err.message}; retry when ready`));
      });
    });
    controls.appendChild(button);
    container.appendChild(controls);

    if (this.rows.length === 0) {
      container.appendChild(el("p", { class: "empty-state" }, "No subjects loaded."));
      this.syncButton(container);
      return;
    }

    const table = el("table", { class: "subjects-table" });
    const head = el("tr");
    for (const title of ["", "subject", "species", "available data", "ages"]) {
      head.appendChild(el("th", {}, title));
    }
    const thead = el("thead");
    thead.appendChild(head);
    table.appendChild(thead);
    const body = el("tbody");
    for (const row of this.rows) {
      const tr = el("tr", { "data-id": row.id });
      const box = el("input", { type: "checkbox", "data-subject": row.id });
      (box as HTMLInputElement).checked = this.checked.has(row.id);
      box.addEventListener("change", () => {
        if ((box as HTMLInputElement).checked) {
          this.checked.add(row.id);
        } else {
          this.checked.delete(row.id);
        }
        this.syncButton(container);
      });
      const checkboxCell = el("td");
      checkboxCell.appendChild(box);
      tr.appendChild(checkboxCell);
      tr.appendChild(el("td", {}, row.id));
      tr.appendChild(el("td", {}, row.species)); // rendered verbatim, no whitelist
      const badges = el("td");
      for (const dataType of row.data_types) {
        badges.appendChild(el("span", { class: "badge" }, dataType));
      }
      tr.appendChild(badges);
      tr.appendChild(el("td", {}, row.ages.join(", ")));
      body.appendChild(tr);
    }
    table.appendChild(body);
    container.appendChild(table);
    this.syncButton(container);
  }

  private syncButton(container: HTMLElement): void {
    const button = container.querySelector("button.download") as HTMLButtonElement | null;
    if (button) {
      button.disabled = !this.downloadEnabled();
    }
  }
}

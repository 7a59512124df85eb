/*
 * Templated query panel with the SPARQL reveal loop: run a published
 * template, show the exact text the service executed, and let the user
 * copy it into a free-text box, edit, and re-run. The revealed text is the
 * service's `sparql` field untouched, so resubmitting it reproduces the
 * table.
 */

import { ApiClient, ApiError, QueryResponse, TemplateInfo } from "./api.js";
import { el, errorBanner, resultTable } from "./render.js";
import { LatestOnly } from "./staleness.js";

export class QueryPanel {
  templates: TemplateInfo[] = [];
  selectedTemplate: string | null = null;
  params: Record<string, string> = {};
  lastResult: QueryResponse | null = null;
  /** Exactly the text the service reports as executed; null before any run. */
  revealedSparql: string | null = null;
  elapsedMs: number | null = null;
  lastError: { line?: number; column?: number; message: string } | null = null;

  private latest = new LatestOnly();

  constructor(private api: ApiClient) {}

  async loadTemplates(): Promise<void> {
    this.templates = (await this.api.templates()).templates;
    if (this.templates.length && this.selectedTemplate === null) {
      this.selectedTemplate = this.templates[0].id;
    }
  }

  revealVisible(): boolean {
    return this.revealedSparql !== null;
  }

  async runTemplate(id: string, params: Record<string, string>): Promise<void> {
    this.selectedTemplate = id;
    this.params = params;
    await this.latest.run(
      () => this.api.runTemplate(id, params),
      (result) => this.adopt(result),
    );
  }

  /** Free-text run (the edit-and-re-run path from the reveal panel). */
  async runText(sparql: string): Promise<void> {
    try {
      await this.latest.run(
        () => this.api.query(sparql),
        (result) => this.adopt(result),
      );
    } catch (err) {
      if (err instanceof ApiError && err.parsePosition) {
        this.lastError = {
          line: err.parsePosition.line,
          column: err.parsePosition.column,
          message: err.message,
        };
        return;
      }
      if (err instanceof ApiError) {
        this.lastError = { message: err.message };
        return;
      }
      throw err;
    }
  }

  private adopt(result: QueryResponse): void {
    this.lastResult = result;
    this.revealedSparql = result.sparql;
    this.elapsedMs = result.elapsed_ms;
    this.lastError = null;
  }

  render(container: HTMLElement): void {
    container.replaceChildren();
    if (this.lastError) {
      const where =
        this.lastError.line !== undefined
          ? ` (line ${this.lastError.line}, column ${this.lastError.column})`
          : "";
      container.appendChild(errorBanner(`query error${where}: ${this.lastError.message}`));
    }
    if (!this.lastResult) {
      return; // reveal panel stays hidden until a query has run
    }
    const meta = el(
      "p",
      { class: "result-meta" },
      `${this.lastResult.row_count} rows in ${this.lastResult.elapsed_ms} ms`,
    );
    container.appendChild(meta);
    container.appendChild(
      resultTable(this.lastResult.vars, this.lastResult.rows, this.lastResult.columns ?? []),
    );
    const reveal = el("details", { class: "reveal-panel", open: "" });
    reveal.appendChild(el("summary", {}, "SPARQL executed"));
    const pre = el("pre", { class: "sparql-text" }, this.revealedSparql ?? "");
    reveal.appendChild(pre);
    const editor = el("textarea", { class: "sparql-editor", rows: "8" });
    (editor as HTMLTextAreaElement).value = this.revealedSparql ?? "";
    reveal.appendChild(editor);
    const rerun = el("button", { class: "rerun" }, "Run edited query");
    rerun.addEventListener("click", () => {
      void this.runText((editor as HTMLTextAreaElement).value).then(() => this.render(container));
    });
    reveal.appendChild(rerun);
    container.appendChild(reveal);
  }
}

/*
 * Typed client for the data-service JSON API. All panels talk to the
 * service exclusively through this module; the fetch implementation is
 * injectable so tests can run against recorded responses.
 */

export interface TermCell {
  type: "iri" | "literal" | "bnode";
  value: string;
  datatype?: string;
  language?: string;
}

export type ResultRow = Record<string, TermCell>;

export interface ColumnInfo {
  var: string;
  qname: string;
  label: string;
  definition: string;
  terminology: string;
}

export interface QueryResponse {
  vars: string[];
  rows: ResultRow[];
  row_count: number;
  elapsed_ms: number;
  sparql: string;
  columns?: ColumnInfo[];
}

export interface SubjectRow {
  id: string;
  species: string;
  data_types: string[];
  ages: string[];
}

export interface SubjectsResponse {
  subjects: SubjectRow[];
  count: number;
}

export interface TemplateSlot {
  name: string;
  type: string;
  required: boolean;
}

export interface TemplateInfo {
  id: string;
  model: string;
  description: string;
  slots: TemplateSlot[];
  sparql: string;
}

export interface MapInfo {
  name: string;
  from_species: string;
  to_species: string;
  threshold: number;
  intercept: number;
  slope: number;
  input_units: string;
  output_units: string;
  citation: string;
}

export interface EquivalencePair {
  from_subject: string;
  from_age: number;
  from_units: string;
  mapped_age: number;
  mapped_units: string;
  to_subject: string;
  to_age: number;
  to_units: string;
  map_name: string;
  tolerance: number;
}

export interface CrossSpeciesResponse {
  map: string;
  tolerance: number;
  pairs: EquivalencePair[];
  count: number;
}

export interface TermDefinition {
  qname: string;
  label: string;
  definition: string;
  terminology: string;
}

export interface ParseErrorDetail {
  error: string;
  line?: number;
  column?: number;
  message: string;
  token?: string;
}

export interface Selection {
  subjects: string[];
  data_types: string[];
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Service error with the parsed detail body when one was provided. */
export class ApiError extends Error {
  status: number;
  detail: ParseErrorDetail | string | null;

  constructor(status: number, detail: ParseErrorDetail | string | null) {
    const text =
      typeof detail === "string" ? detail : detail ? detail.message : `HTTP ${status}`;
    super(text);
    this.status = status;
    this.detail = detail;
  }

  get parsePosition(): { line: number; column: number } | null {
    if (this.detail && typeof this.detail !== "string" && this.detail.line !== undefined) {
      return { line: this.detail.line, column: this.detail.column ?? 1 };
    }
    return null;
  }
}

export class ApiClient {
  private base: string;
  private fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = (...args) => fetch(...args)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let detail: ParseErrorDetail | string | null = null;
      try {
        const body = await response.json();
        detail = body.detail ?? null;
      } catch {
        detail = null;
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    return (await this.request(path)).json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return response.json() as Promise<T>;
  }

  subjects(): Promise<SubjectsResponse> {
    return this.getJson("/subjects");
  }

  templates(): Promise<{ templates: TemplateInfo[] }> {
    return this.getJson("/templates");
  }

  runTemplate(id: string, params: Record<string, string>): Promise<QueryResponse> {
    return this.postJson(`/templates/${id}/run`, { params });
  }

  query(sparql: string): Promise<QueryResponse> {
    return this.postJson("/query", { sparql });
  }

  maps(): Promise<{ maps: MapInfo[] }> {
    return this.getJson("/maps");
  }

  crossSpecies(map: string, tolerance: number): Promise<CrossSpeciesResponse> {
    return this.postJson("/crossspecies", { map, tolerance });
  }

  term(qname: string): Promise<TermDefinition> {
    return this.getJson(`/terms/${qname}`);
  }

  async exportCsv(body: { sparql: string } | { selection: Selection }): Promise<Uint8Array> {
    const response = await this.request("/export", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return new Uint8Array(await response.arrayBuffer());
  }
}

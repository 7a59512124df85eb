/*
 * Term-definition tooltips: a column annotated with a vocabulary term gets
 * its label, definition, and source terminology from GET /terms. Responses
 * are cached; a missing definition renders no tooltip rather than an error.
 */

import { ApiClient, TermDefinition } from "./api.js";

export class TooltipCache {
  private cache = new Map<string, TermDefinition | null>();

  constructor(private api: ApiClient) {}

  async get(qname: string): Promise<TermDefinition | null> {
    if (this.cache.has(qname)) {
      return this.cache.get(qname) ?? null;
    }
    let definition: TermDefinition | null;
    try {
      definition = await this.api.term(qname);
    } catch {
      definition = null; // unregistered terms simply have no tooltip
    }
    this.cache.set(qname, definition);
    return definition;
  }

  static text(definition: TermDefinition): string {
    return `${definition.label}: ${definition.definition} [${definition.terminology}]`;
  }
}

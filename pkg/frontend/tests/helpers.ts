/*
 * Test support: fixtures recorded from the real service (see
 * tools/export_ui_fixtures.py) and a fake fetch that serves them, recording
 * every request it sees.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixtureJson<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function fixtureBytes(name: string): Uint8Array {
  return new Uint8Array(readFileSync(join(FIXTURES, name)));
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

type Route = {
  method: string;
  path: string;
  status?: number;
  json?: unknown;
  bytes?: Uint8Array;
  /** optional gate so tests can hold a response until they choose */
  release?: Promise<void>;
};

export class FakeFetch {
  requests: RecordedRequest[] = [];
  private routes: Route[] = [];

  on(route: Route): this {
    this.routes.push(route);
    return this;
  }

  get fetch(): FetchLike {
    return async (input: string, init?: RequestInit) => {
      const method = (init?.method ?? "GET").toUpperCase();
      const path = input.replace(/^https?:\/\/[^/]+/, "");
      const body = init?.body ? JSON.parse(init.body as string) : null;
      this.requests.push({ method, path, body });
      const route = this.routes.find((r) => r.method === method && r.path === path);
      if (!route) {
        return new Response(JSON.stringify({ detail: `no route ${method} ${path}` }), {
          status: 404,
          headers: { "Content-Type": "application/json" },
        });
      }
      if (route.release) {
        await route.release;
      }
      if (route.bytes !== undefined) {
        return new Response(route.bytes.slice().buffer as ArrayBuffer, {
          status: route.status ?? 200,
          headers: { "Content-Type": "text/csv" },
        });
      }
      return new Response(JSON.stringify(route.json), {
        status: route.status ?? 200,
        headers: { "Content-Type": "application/json" },
      });
    };
  }
}

export function bytesEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) {
    return false;
  }
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) {
      return false;
    }
  }
  return true;
}

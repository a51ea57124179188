import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";
import type { DraftStore } from "../src/verdict.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

interface Manifest {
  pending_ids: number[];
  domains: Record<string, string>;
  disinformation_verdict_id: number;
  news_verdict_id: number;
}

export const manifest = fixture<Manifest>("manifest.json");

function json(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function text(body: string, status = 200): Response {
  return new Response(body, { status, headers: { "content-type": "text/plain" } });
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

/**
 * In-memory stand-in for the service, replaying the recorded fixture
 * walk: the fixtures were captured from the real API in this exact
 * sequence (verdict on the disinformation item first, then the news
 * item), so state transitions here serve only recorded payloads.
 */
export class FixtureServer {
  calls: RecordedCall[] = [];
  failNextRequest = false;
  private labeled = new Set<number>();

  private feedText(): string {
    if (this.labeled.has(manifest.disinformation_verdict_id)) {
      return this.labeled.has(manifest.news_verdict_id)
        ? fixtureText("feed_after_news.txt")
        : fixtureText("feed_after_disinformation.txt");
    }
    return fixtureText("feed_initial.txt");
  }

  fetch: FetchLike = async (input, init) => {
    const url = new URL(input, "http://service.test");
    const method = (init?.method ?? "GET").toUpperCase();
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    this.calls.push({ method, path: url.pathname + url.search, body });

    if (this.failNextRequest) {
      this.failNextRequest = false;
      throw new TypeError("network dropped");
    }

    if (method === "GET" && url.pathname === "/api/queue") {
      const page = fixture<{ items: { id: number }[] }>("queue_pending.json");
      return json({ items: page.items.filter((i) => !this.labeled.has(i.id)) });
    }

    let m = url.pathname.match(/^\/api\/queue\/(\d+)$/);
    if (method === "GET" && m) {
      const id = Number(m[1]);
      if (!manifest.pending_ids.includes(id)) return json({ detail: `unknown item ${id}` }, 404);
      if (this.labeled.has(id) && id === manifest.disinformation_verdict_id) {
        return json(fixture(`detail_${id}_labeled.json`));
      }
      return json(fixture(`detail_${id}.json`));
    }

    m = url.pathname.match(/^\/api\/queue\/(\d+)\/verdict$/);
    if (method === "POST" && m) {
      const id = Number(m[1]);
      if (!manifest.pending_ids.includes(id)) return json({ detail: `unknown item ${id}` }, 404);
      if (this.labeled.has(id)) return json(fixture("verdict_conflict.json"), 409);
      this.labeled.add(id);
      if (id === manifest.disinformation_verdict_id) {
        return json(fixture("verdict_disinformation.json"));
      }
      return json(fixture("verdict_news.json"));
    }

    m = url.pathname.match(/^\/api\/records\/(.+)$/);
    if (method === "GET" && m) {
      return json(fixture(`record_${decodeURIComponent(m[1]!)}.json`));
    }

    if (method === "GET" && url.pathname === "/api/stats") {
      return json(fixture("stats.json"));
    }
    if (method === "GET" && url.pathname === "/feed.txt") {
      return text(this.feedText());
    }
    return json({ detail: `unrouted: ${method} ${url.pathname}` }, 500);
  };
}

export class MemoryDrafts implements DraftStore {
  private map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}

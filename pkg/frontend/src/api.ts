import type { EvidenceRecord, Label, QueueItem, QueuePage, Stats } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function errorDetail(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return res.statusText || "request failed";
  }
}

/**
 * Thin client over the service HTTP API. Every method is exactly one
 * request; state lives on the server.
 */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    return (await res.json()) as T;
  }

  queue(state = "pending"): Promise<QueuePage> {
    return this.json(`/api/queue?state=${encodeURIComponent(state)}`);
  }

  item(id: number): Promise<QueueItem> {
    return this.json(`/api/queue/${id}`);
  }

  record(domain: string): Promise<EvidenceRecord> {
    return this.json(`/api/records/${encodeURIComponent(domain)}`);
  }

  stats(): Promise<Stats> {
    return this.json("/api/stats");
  }

  submitVerdict(id: number, label: Label, note: string): Promise<QueueItem> {
    return this.json(`/api/queue/${id}/verdict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ label, note }),
    });
  }

  /** Blocklist domains, one per line on the wire. */
  async feed(): Promise<string[]> {
    const res = await this.fetchFn(this.base + "/feed.txt");
    if (!res.ok) throw new ApiError(res.status, await errorDetail(res));
    const text = await res.text();
    return text.split("\n").filter((line) => line.length > 0);
  }
}

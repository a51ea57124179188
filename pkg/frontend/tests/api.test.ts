import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { FixtureServer, fixture, manifest } from "./helpers.js";
import type { QueuePage, Stats } from "../src/types.js";

describe("api client", () => {
  let server: FixtureServer;
  let api: ApiClient;

  beforeEach(() => {
    server = new FixtureServer();
    api = new ApiClient("", server.fetch);
  });

  it("lists the queue with one GET", async () => {
    const page = await api.queue("pending");
    expect(page.items.length).toBe(fixture<QueuePage>("queue_pending.json").items.length);
    expect(server.calls).toEqual([
      { method: "GET", path: "/api/queue?state=pending", body: undefined },
    ]);
  });

  it("fetches one item by id", async () => {
    const item = await api.item(manifest.pending_ids[0]!);
    expect(item.id).toBe(manifest.pending_ids[0]);
    expect(item.prediction.top_features.length).toBe(3);
  });

  it("encodes the domain in the records path", async () => {
    const domain = manifest.domains[String(manifest.pending_ids[0])]!;
    const record = await api.record(domain);
    expect(record.domain).toBe(domain);
    expect(server.calls[0]!.path).toBe(`/api/records/${encodeURIComponent(domain)}`);
  });

  it("submits a verdict as a single JSON POST", async () => {
    const updated = await api.submitVerdict(manifest.news_verdict_id, "news", "local paper");
    expect(updated.state).toBe("labeled");
    expect(server.calls.length).toBe(1);
    expect(server.calls[0]).toEqual({
      method: "POST",
      path: `/api/queue/${manifest.news_verdict_id}/verdict`,
      body: { label: "news", note: "local paper" },
    });
  });

  it("maps a conflict response to ApiError 409 with the server's detail", async () => {
    await api.submitVerdict(manifest.disinformation_verdict_id, "disinformation", "");
    const err = await api
      .submitVerdict(manifest.disinformation_verdict_id, "other", "")
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).detail).toContain("already labeled");
  });

  it("maps unknown items to ApiError 404", async () => {
    const err = await api.item(999).catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(404);
  });

  it("parses the feed into domains and drops blank lines", async () => {
    expect(await api.feed()).toEqual([]);
    await api.submitVerdict(manifest.disinformation_verdict_id, "disinformation", "");
    const feed = await api.feed();
    expect(feed).toEqual([manifest.domains[String(manifest.disinformation_verdict_id)]]);
  });

  it("returns stats as recorded", async () => {
    const stats = await api.stats();
    const recorded = fixture<Stats>("stats.json");
    expect(stats.archived).toBe(recorded.archived);
    expect(stats.queue).toEqual(recorded.queue);
    expect(stats.model_version).toBe(recorded.model_version);
  });
});

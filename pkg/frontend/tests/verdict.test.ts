import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Dashboard } from "../src/app.js";
import { VerdictController, type VerdictEvents } from "../src/verdict.js";
import type { QueueItem } from "../src/types.js";
import { FixtureServer, MemoryDrafts, fixture, manifest } from "./helpers.js";

const itemId = manifest.disinformation_verdict_id;

function pendingItem(): QueueItem {
  return fixture<QueueItem>(`detail_${itemId}.json`);
}

interface Seen {
  optimistic: QueueItem[];
  applied: QueueItem[];
  conflicts: string[];
  failures: { message: string; retry: () => Promise<void> }[];
}

function collector(): { events: VerdictEvents; seen: Seen } {
  const seen: Seen = { optimistic: [], applied: [], conflicts: [], failures: [] };
  return {
    seen,
    events: {
      onOptimistic: (item) => seen.optimistic.push(item),
      onApplied: (item) => seen.applied.push(item),
      onConflict: (message) => seen.conflicts.push(message),
      onFailure: (message, retry) => seen.failures.push({ message, retry }),
    },
  };
}

describe("verdict controller", () => {
  let server: FixtureServer;
  let drafts: MemoryDrafts;

  beforeEach(() => {
    server = new FixtureServer();
    drafts = new MemoryDrafts();
  });

  function controller(events: VerdictEvents): VerdictController {
    return new VerdictController(new ApiClient("", server.fetch), events, drafts);
  }

  it("applies the optimistic flip before the server answers", async () => {
    let resolveRequest!: (r: Response) => void;
    const gate = new Promise<Response>((r) => (resolveRequest = r));
    const slowFetch = async (input: string, init?: RequestInit) => {
      const real = await server.fetch(input, init);
      await gate;
      return real;
    };
    const { events, seen } = collector();
    const c = new VerdictController(new ApiClient("", slowFetch), events, drafts);

    const submit = c.submit(pendingItem(), "disinformation");
    expect(seen.optimistic.length).toBe(1);
    expect(seen.optimistic[0]!.state).toBe("labeled");
    expect(seen.applied.length).toBe(0);

    resolveRequest(new Response(null));
    await submit;
    expect(seen.applied.length).toBe(1);
    // server truth replaces the optimistic guess
    expect(seen.applied[0]!.verdict?.decided_at).not.toBe("");
  });

  it("sends the draft note and clears it after a successful submit", async () => {
    const { events, seen } = collector();
    const c = controller(events);
    c.saveDraft(itemId, "checked the mirror sites");

    await c.submit(pendingItem(), "disinformation");

    const post = server.calls.find((call) => call.method === "POST");
    expect(post?.body).toEqual({ label: "disinformation", note: "checked the mirror sites" });
    expect(c.loadDraft(itemId)).toBe("");
    expect(seen.applied.length).toBe(1);
  });

  it("surfaces a conflict without losing the session", async () => {
    const { events, seen } = collector();
    const c = controller(events);
    await c.submit(pendingItem(), "disinformation");
    await c.submit(pendingItem(), "other");

    expect(seen.conflicts.length).toBe(1);
    expect(seen.conflicts[0]).toContain("already labeled");
    expect(seen.applied.length).toBe(1);
    expect(seen.failures.length).toBe(0);
  });

  it("keeps the draft note on network failure and retries cleanly", async () => {
    const { events, seen } = collector();
    const c = controller(events);
    c.saveDraft(itemId, "half-written note");
    server.failNextRequest = true;

    await c.submit(pendingItem(), "disinformation");
    expect(seen.failures.length).toBe(1);
    expect(seen.applied.length).toBe(0);
    expect(c.loadDraft(itemId)).toBe("half-written note");

    await seen.failures[0]!.retry();
    expect(seen.applied.length).toBe(1);
    const post = server.calls.filter((call) => call.method === "POST").pop();
    expect(post?.body).toEqual({ label: "disinformation", note: "half-written note" });
    expect(c.loadDraft(itemId)).toBe("");
  });

  it("drafts survive a new controller instance over the same store", () => {
    const first = controller(collector().events);
    first.saveDraft(itemId, "to be continued");
    const second = controller(collector().events);
    expect(second.loadDraft(itemId)).toBe("to be continued");
  });
});

describe("dashboard verdict flow", () => {
  let server: FixtureServer;
  let root: HTMLElement;
  let drafts: MemoryDrafts;
  let dash: Dashboard;

  beforeEach(async () => {
    server = new FixtureServer();
    root = document.createElement("div");
    drafts = new MemoryDrafts();
    dash = new Dashboard(root, new ApiClient("", server.fetch), drafts);
    dash.start();
    await dash.settle();
  });

  it("typing a note persists the draft; reopening restores it", async () => {
    dash.openItem(itemId);
    await dash.settle();
    const note = root.querySelector<HTMLTextAreaElement>(".note")!;
    note.value = "looks templated";
    note.dispatchEvent(new Event("input"));

    dash.showQueue();
    await dash.settle();
    dash.openItem(itemId);
    await dash.settle();
    expect(root.querySelector<HTMLTextAreaElement>(".note")!.value).toBe("looks templated");
  });

  it("a conflicting verdict shows a notice and reloads the labeled item", async () => {
    dash.openItem(itemId);
    await dash.settle();
    // another session labels it while this one is reviewing
    await new ApiClient("", server.fetch).submitVerdict(itemId, "disinformation", "");

    root.querySelector<HTMLButtonElement>('button[data-label="other"]')!.click();
    await dash.settle();

    const notice = root.querySelector(".notice.conflict");
    expect(notice?.textContent).toContain("already labeled");
    // reloaded from the server: controls now disabled
    const buttons = [...root.querySelectorAll<HTMLButtonElement>(".verdict-controls button")];
    expect(buttons.length).toBe(3);
    expect(buttons.every((b) => b.disabled)).toBe(true);
  });

  it("a dropped request offers retry and the retry lands the verdict", async () => {
    dash.openItem(itemId);
    await dash.settle();
    server.failNextRequest = true;
    root.querySelector<HTMLButtonElement>('button[data-label="disinformation"]')!.click();
    await dash.settle();

    const retry = root.querySelector<HTMLButtonElement>(".notice.error .retry");
    expect(retry).not.toBeNull();
    retry!.click();
    await dash.settle();

    expect(root.querySelector(".notice.saved")).not.toBeNull();
    const posts = server.calls.filter((c) => c.method === "POST");
    expect(posts.length).toBe(2); // the drop and the successful retry
    const feed = await new ApiClient("", server.fetch).feed();
    expect(feed).toContain(manifest.domains[String(itemId)]!);
  });
});

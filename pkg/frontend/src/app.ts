import { ApiClient } from "./api.js";
import { renderDetail } from "./detail.js";
import { el } from "./dom.js";
import { renderQueue } from "./queue.js";
import { renderFeed, renderStats } from "./stats.js";
import { VerdictController, type DraftStore } from "./verdict.js";
import type { EvidenceRecord, Label, QueueItem, QueuePage, Stats } from "./types.js";

interface Notice {
  kind: "saved" | "conflict" | "error";
  message: string;
  retry?: () => Promise<void>;
}

/**
 * Single-page moderation dashboard. The server is the source of truth:
 * every mutation is one API call, and every screen renders exactly what
 * the API returned. Work is funneled through a promise chain so tests
 * can await a quiescent UI with settle().
 */
export class Dashboard {
  private page: QueuePage = { items: [] };
  private stats: Stats | null = null;
  private feedDomains: string[] = [];
  private current: { item: QueueItem; evidence: EvidenceRecord | null } | null = null;
  private notice: Notice | null = null;
  private verdicts: VerdictController;
  private work: Promise<void> = Promise.resolve();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    drafts: DraftStore = globalThis.localStorage,
  ) {
    this.verdicts = new VerdictController(api, {
      onOptimistic: (item) => this.applyItem(item),
      onApplied: (item) => {
        this.applyItem(item);
        this.notice = { kind: "saved", message: `verdict recorded for ${item.domain}` };
        this.enqueue(() => this.refreshShared());
      },
      onConflict: (message) => {
        this.notice = { kind: "conflict", message };
        this.enqueue(() => this.reloadCurrent());
      },
      onFailure: (message, retry) => {
        this.notice = { kind: "error", message, retry };
        this.render();
      },
    }, drafts);
  }

  private enqueue(task: () => Promise<void>): void {
    this.work = this.work.then(() =>
      task().catch((err) => {
        this.notice = { kind: "error", message: err instanceof Error ? err.message : String(err) };
        this.render();
      }),
    );
  }

  /** Resolves once all queued loads and submits have finished. */
  async settle(): Promise<void> {
    let last: Promise<void>;
    do {
      last = this.work;
      await last;
    } while (this.work !== last);
  }

  start(): void {
    this.enqueue(async () => {
      await this.refreshShared();
      this.render();
    });
  }

  showQueue(): void {
    this.current = null;
    this.enqueue(async () => {
      await this.refreshShared();
      this.render();
    });
  }

  openItem(id: number): void {
    this.enqueue(async () => {
      const item = await this.api.item(id);
      let evidence: EvidenceRecord | null = null;
      try {
        evidence = await this.api.record(item.domain);
      } catch {
        // an item can outlive its archive file; review still works
      }
      this.current = { item, evidence };
      this.render();
    });
  }

  private async refreshShared(): Promise<void> {
    this.page = await this.api.queue("pending");
    this.feedDomains = await this.api.feed();
    this.stats = await this.api.stats();
    this.render();
  }

  private async reloadCurrent(): Promise<void> {
    if (this.current) {
      this.current = {
        item: await this.api.item(this.current.item.id),
        evidence: this.current.evidence,
      };
    }
    await this.refreshShared();
  }

  private applyItem(item: QueueItem): void {
    if (this.current && this.current.item.id === item.id) {
      this.current = { item, evidence: this.current.evidence };
    }
    this.page = {
      items: this.page.items.map((row) => (row.id === item.id ? item : row)),
    };
    this.render();
  }

  private submitVerdict(label: Label): void {
    const current = this.current;
    if (!current) return;
    this.enqueue(() => this.verdicts.submit(current.item, label));
  }

  private renderNotice(): HTMLElement | null {
    if (!this.notice) return null;
    const box = el("div", { class: `notice ${this.notice.kind}`, role: "status" });
    box.append(el("span", {}, this.notice.message));
    const retry = this.notice.retry;
    if (retry) {
      const button = el("button", { class: "retry", type: "button" }, "Retry");
      button.addEventListener("click", () => {
        this.notice = null;
        this.enqueue(() => retry());
      });
      box.append(" ", button);
    }
    const dismiss = el("button", { class: "dismiss", type: "button" }, "Dismiss");
    dismiss.addEventListener("click", () => {
      this.notice = null;
      this.render();
    });
    box.append(" ", dismiss);
    return box;
  }

  private render(): void {
    const children: (HTMLElement | null)[] = [el("h1", {}, "Domain triage"), this.renderNotice()];

    if (this.current) {
      const { item, evidence } = this.current;
      children.push(
        renderDetail(item, evidence, {
          onVerdict: (label) => this.submitVerdict(label),
          onNoteInput: (note) => this.verdicts.saveDraft(item.id, note),
          onBack: () => this.showQueue(),
        }, this.verdicts.loadDraft(item.id)),
      );
    } else {
      children.push(renderQueue(this.page, { onOpen: (id) => this.openItem(id) }));
      children.push(renderFeed(this.feedDomains));
    }

    if (this.stats) children.push(renderStats(this.stats));
    this.root.replaceChildren(...children.filter((c): c is HTMLElement => c !== null));
  }
}

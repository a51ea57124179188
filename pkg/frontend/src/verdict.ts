import { ApiError, type ApiClient } from "./api.js";
import type { Label, QueueItem } from "./types.js";

export interface DraftStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface VerdictEvents {
  /** Immediate local flip so the UI never waits on the network. */
  onOptimistic(item: QueueItem): void;
  /** Server truth after a successful submit. */
  onApplied(item: QueueItem): void;
  /** Someone else labeled it first; caller should reload and move on. */
  onConflict(message: string): void;
  /** Transport trouble; retry re-submits with the preserved note. */
  onFailure(message: string, retry: () => Promise<void>): void;
}

const KEY_PREFIX = "verdict-draft:";

/**
 * Owns the verdict lifecycle: draft notes survive reloads and failed
 * submits, a click updates the view optimistically, and the server
 * response (or conflict) reconciles it. One API call per submit.
 */
export class VerdictController {
  constructor(
    private readonly api: Pick<ApiClient, "submitVerdict">,
    private readonly events: VerdictEvents,
    private readonly drafts: DraftStore,
  ) {}

  loadDraft(id: number): string {
    return this.drafts.getItem(KEY_PREFIX + id) ?? "";
  }

  saveDraft(id: number, note: string): void {
    if (note) {
      this.drafts.setItem(KEY_PREFIX + id, note);
    } else {
      this.drafts.removeItem(KEY_PREFIX + id);
    }
  }

  async submit(item: QueueItem, label: Label): Promise<void> {
    const note = this.loadDraft(item.id);
    this.events.onOptimistic({
      ...item,
      state: "labeled",
      verdict: { label, moderator_note: note, decided_at: "" },
    });
    try {
      const updated = await this.api.submitVerdict(item.id, label, note);
      this.drafts.removeItem(KEY_PREFIX + item.id);
      this.events.onApplied(updated);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.events.onConflict(err.detail);
        return;
      }
      const message = err instanceof Error ? err.message : String(err);
      // note stays in the draft store; retry reads it again
      this.events.onFailure(message, () => this.submit(item, label));
    }
  }
}

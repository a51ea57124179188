import { el } from "./dom.js";
import { day, pct } from "./format.js";
import type { QueuePage } from "./types.js";

export interface QueueHandlers {
  onOpen(id: number): void;
}

/**
 * Pending-review table. Rows keep the server's ordering so a refresh
 * never shuffles the page under the moderator.
 */
export function renderQueue(page: QueuePage, handlers: QueueHandlers): HTMLElement {
  const section = el("section", { class: "queue" });
  section.append(el("h2", {}, "Moderation queue"));

  if (page.items.length === 0) {
    section.append(el("p", { class: "empty" }, "Queue is empty."));
    return section;
  }

  const head = el(
    "tr",
    {},
    el("th", {}, "Domain"),
    el("th", {}, "P(disinformation)"),
    el("th", {}, "First seen"),
    el("th", {}, ""),
  );
  const body = el("tbody", {});
  for (const item of page.items) {
    const open = el("button", { class: "open", type: "button" }, "Review");
    open.addEventListener("click", () => handlers.onOpen(item.id));
    body.append(
      el(
        "tr",
        { "data-item-id": String(item.id), class: "queue-row" },
        el("td", { class: "domain" }, item.domain),
        el("td", { class: "prob" }, pct(item.prediction.probabilities.disinformation)),
        el("td", { class: "seen" }, day(item.first_seen)),
        el("td", {}, open),
      ),
    );
  }
  section.append(el("table", {}, el("thead", {}, head), body));
  return section;
}

import { el } from "./dom.js";
import type { Stats } from "./types.js";

export function renderStats(stats: Stats): HTMLElement {
  const parts = [
    `${stats.archived} archived`,
    `${stats.queue.pending} pending`,
    `${stats.queue.labeled} labeled`,
    `model ${stats.model_version}`,
  ];
  return el("p", { class: "stats" }, parts.join(" | "));
}

export function renderFeed(domains: string[]): HTMLElement {
  const section = el("section", { class: "feed" });
  section.append(el("h3", {}, `Published blocklist (${domains.length})`));
  const list = el("ul", {});
  for (const domain of domains) {
    list.append(el("li", { class: "feed-domain" }, domain));
  }
  section.append(domains.length ? list : el("p", { class: "empty" }, "No confirmed domains yet."));
  return section;
}

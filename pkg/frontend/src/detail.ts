import { el } from "./dom.js";
import { contribution, day, flag, listed, pct } from "./format.js";
import { LABELS, type EvidenceRecord, type Label, type QueueItem } from "./types.js";

export interface DetailHandlers {
  onVerdict(label: Label): void;
  onNoteInput(note: string): void;
  onBack(): void;
}

function definitionRows(pairs: [string, string][]): HTMLElement {
  const dl = el("dl", {});
  for (const [term, value] of pairs) {
    dl.append(el("dt", {}, term), el("dd", {}, value));
  }
  return dl;
}

function evidencePanels(evidence: EvidenceRecord): HTMLElement {
  const { whois, cert, dns } = evidence.record;
  const f = evidence.features;
  const wrap = el("div", { class: "evidence" });

  wrap.append(
    el(
      "section",
      { class: "panel whois" },
      el("h3", {}, "Registration"),
      definitionRows([
        ["Registrar", listed(whois.registrar)],
        ["Created", day(whois.created)],
        ["Updated", day(whois.updated)],
        ["Expires", day(whois.expires)],
        ["Registrant org", listed(whois.registrant_org)],
        ["Registrant country", listed(whois.registrant_country)],
        ["Privacy service", flag(f["whois_privacy"])],
      ]),
    ),
    el(
      "section",
      { class: "panel cert" },
      el("h3", {}, "Certificate"),
      cert.available && !cert.parse_error
        ? definitionRows([
            ["Issuer", listed(cert.issuer_name)],
            ["Subject", listed(cert.subject_cn)],
            ["Valid", `${day(cert.not_before)} to ${day(cert.not_after)}`],
            ["Names", listed(cert.san_entries)],
            ["Self-signed", flag(cert.self_signed)],
            ["Expired", flag(f["cert_expired"])],
          ])
        : el("p", { class: "missing" }, cert.available ? "unparseable certificate" : "none presented"),
    ),
    el(
      "section",
      { class: "panel hosting" },
      el("h3", {}, "Hosting"),
      definitionRows([
        ["Resolves", flag(dns.resolves)],
        ["Addresses", listed(dns.addresses)],
        ["Nameservers", listed(dns.nameserver_hosts)],
        ["Nameserver operator", listed(f["nameserver_sld"])],
        ["Website AS", listed(f["website_as"])],
        ["Website country", listed(f["website_country"])],
      ]),
    ),
    el(
      "section",
      { class: "panel cms" },
      el("h3", {}, "CMS fingerprint"),
      definitionRows([
        ["WordPress", flag(f["wordpress_cms"])],
        ["Theme", listed(f["wp_theme"])],
        ["Plugins", listed(f["wp_plugins"])],
      ]),
    ),
  );
  return wrap;
}

/**
 * Single-item review screen: probabilities, the server's top-3 feature
 * explanations (rendered exactly as sent, order included), the evidence
 * panels, and the verdict controls.
 */
export function renderDetail(
  item: QueueItem,
  evidence: EvidenceRecord | null,
  handlers: DetailHandlers,
  draftNote = "",
): HTMLElement {
  const section = el("section", { class: "detail", "data-item-id": String(item.id) });

  const back = el("button", { class: "back", type: "button" }, "Back to queue");
  back.addEventListener("click", () => handlers.onBack());
  section.append(back, el("h2", {}, item.domain), el("p", { class: "state" }, item.state));

  const probs = el("ul", { class: "probabilities" });
  for (const label of LABELS) {
    const li = el(
      "li",
      { "data-class": label },
      `${label}: ${pct(item.prediction.probabilities[label])}`,
    );
    if (label === item.prediction.predicted_class) li.classList.add("predicted");
    probs.append(li);
  }
  section.append(probs);

  // the API sends exactly three, pre-ranked; no client-side sorting
  const features = el("ol", { class: "top-features" });
  for (const [name, value] of item.prediction.top_features) {
    features.append(
      el(
        "li",
        { "data-feature": name },
        el("span", { class: "name" }, name),
        " ",
        el("span", { class: "contribution" }, contribution(value)),
      ),
    );
  }
  section.append(el("h3", {}, "Why it was flagged"), features);

  if (evidence) section.append(evidencePanels(evidence));

  const labeled = item.state !== "pending";
  const controls = el("div", { class: "verdict-controls" });
  for (const label of LABELS) {
    const button = el("button", { "data-label": label, type: "button" }, label);
    if (labeled) button.disabled = true;
    button.addEventListener("click", () => handlers.onVerdict(label));
    controls.append(button);
  }
  const note = el("textarea", {
    class: "note",
    placeholder: "optional moderator note",
  });
  note.value = draftNote;
  if (labeled) note.disabled = true;
  note.addEventListener("input", () => handlers.onNoteInput(note.value));
  controls.append(note);

  if (item.verdict) {
    controls.append(
      el(
        "p",
        { class: "verdict-summary" },
        `labeled ${item.verdict.label} at ${day(item.verdict.decided_at)}` +
          (item.verdict.moderator_note ? `: ${item.verdict.moderator_note}` : ""),
      ),
    );
  }
  section.append(controls);
  return section;
}

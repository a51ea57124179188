// Wire types for the triage service API. The dashboard renders these
// payloads verbatim; nothing here is recomputed client-side.

export const LABELS = ["disinformation", "news", "other"] as const;
export type Label = (typeof LABELS)[number];

export interface Prediction {
  domain: string;
  predicted_class: Label;
  probabilities: Record<Label, number>;
  /** [feature name, contribution], already ranked by the server. */
  top_features: [string, number][];
  model_version: string;
}

export interface Verdict {
  label: Label;
  moderator_note: string;
  decided_at: string;
}

export interface QueueItem {
  id: number;
  domain: string;
  prediction: Prediction;
  evidence_ref: number;
  first_seen: string;
  state: "pending" | "labeled";
  verdict: Verdict | null;
}

export interface QueuePage {
  items: QueueItem[];
}

export interface DnsSection {
  resolves: boolean;
  addresses: string[];
  nameserver_hosts: string[];
  nameserver_addresses: Record<string, string[]>;
}

export interface WhoisSection {
  available: boolean;
  registrar: string | null;
  created: string | null;
  updated: string | null;
  expires: string | null;
  registrant_org: string | null;
  registrant_country: string | null;
  raw_text: string | null;
}

export interface CertSection {
  available: boolean;
  parse_error: boolean;
  issuer_name: string | null;
  issuer_country: string | null;
  subject_cn: string | null;
  subject_org: string | null;
  not_before: string | null;
  not_after: string | null;
  san_entries: string[];
  self_signed: boolean;
}

export interface HttpSection {
  available: boolean;
  status: number | null;
  final_url: string | null;
  redirect_count: number;
  body: string | null;
}

export interface ProbeRecord {
  domain: string;
  probed_at: string;
  dns: DnsSection;
  whois: WhoisSection;
  cert: CertSection;
  http: HttpSection;
}

/** GET /api/records/{domain}: archived evidence plus the stored vector. */
export interface EvidenceRecord {
  domain: string;
  probed_at: string;
  record: ProbeRecord;
  features: Record<string, unknown>;
  prediction: Prediction | null;
  pipeline_version: number;
}

export interface Stats {
  archived: number;
  per_class: Partial<Record<Label, number>>;
  queue: { pending: number; labeled: number };
  feature_importance: Record<string, number>;
  model_version: string;
}

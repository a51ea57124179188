// Display formatting only. Values come from the API and are never
// recombined or rescored here.

export function pct(p: number): string {
  return (100 * p).toFixed(1) + "%";
}

/** Signed, three decimals; contribution signs matter to moderators. */
export function contribution(v: number): string {
  return (v >= 0 ? "+" : "") + v.toFixed(3);
}

export function day(iso: string | null): string {
  return iso ? iso.slice(0, 10) : "unknown";
}

export function flag(v: unknown): string {
  if (v === true) return "yes";
  if (v === false) return "no";
  return "unknown";
}

export function listed(v: unknown): string {
  if (Array.isArray(v)) return v.length ? v.join(", ") : "none";
  if (v === null || v === undefined || v === "") return "none";
  return String(v);
}

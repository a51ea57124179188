"""Infrastructure probing: DNS, WHOIS, TLS certificate, and HTTP observations.

All sub-probes go through a transport object so live collection and fixture
replay share one code path. Every section of a ProbeRecord can independently
be unavailable; a failed sub-probe never aborts the record.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Any, Callable

from cryptography import x509
from cryptography.hazmat.primitives import hashes

from . import datafiles

DEFAULT_BODY_CAP = 512 * 1024


@dataclass
class ProbeLimits:
    timeout: float = 10.0
    redirect_cap: int = 10
    body_cap: int = DEFAULT_BODY_CAP


@dataclass
class DnsObservation:
    resolves: bool = False
    addresses: list[str] = field(default_factory=list)
    nameserver_hosts: list[str] = field(default_factory=list)
    # keyed by nameserver host so the feature layer can pick a host's address
    nameserver_addresses: dict[str, list[str]] = field(default_factory=dict)


@dataclass
class WhoisObservation:
    available: bool = False
    registrar: str | None = None
    registrant_org: str | None = None
    registrant_country: str | None = None
    created: date | None = None
    updated: date | None = None
    expires: date | None = None
    raw_text: str = ""


@dataclass
class CertObservation:
    available: bool = False
    subject_cn: str | None = None
    subject_org: str | None = None
    issuer_name: str | None = None
    issuer_country: str | None = None
    san_entries: list[str] = field(default_factory=list)
    not_before: date | None = None
    not_after: date | None = None
    self_signed: bool = False
    parse_error: bool = False


@dataclass
class HttpObservation:
    available: bool = False
    final_url: str | None = None
    status: int | None = None
    redirect_count: int = 0
    body: str | None = None
    headers: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class ProbeRecord:
    domain: str
    probed_at: datetime
    dns: DnsObservation
    whois: WhoisObservation
    cert: CertObservation
    http: HttpObservation


# --- serialization -----------------------------------------------------------

def _date_str(d: date | None) -> str | None:
    return d.isoformat() if d else None


def _parse_date(s: str | None) -> date | None:
    return date.fromisoformat(s) if s else None


def record_to_dict(record: ProbeRecord) -> dict[str, Any]:
    return {
        "domain": record.domain,
        "probed_at": record.probed_at.astimezone(timezone.utc).isoformat(),
        "dns": {
            "resolves": record.dns.resolves,
            "addresses": record.dns.addresses,
            "nameserver_hosts": record.dns.nameserver_hosts,
            "nameserver_addresses": record.dns.nameserver_addresses,
        },
        "whois": {
            "available": record.whois.available,
            "registrar": record.whois.registrar,
            "registrant_org": record.whois.registrant_org,
            "registrant_country": record.whois.registrant_country,
            "created": _date_str(record.whois.created),
            "updated": _date_str(record.whois.updated),
            "expires": _date_str(record.whois.expires),
            "raw_text": record.whois.raw_text,
        },
        "cert": {
            "available": record.cert.available,
            "subject_cn": record.cert.subject_cn,
            "subject_org": record.cert.subject_org,
            "issuer_name": record.cert.issuer_name,
            "issuer_country": record.cert.issuer_country,
            "san_entries": record.cert.san_entries,
            "not_before": _date_str(record.cert.not_before),
            "not_after": _date_str(record.cert.not_after),
            "self_signed": record.cert.self_signed,
            "parse_error": record.cert.parse_error,
        },
        "http": {
            "available": record.http.available,
            "final_url": record.http.final_url,
            "status": record.http.status,
            "redirect_count": record.http.redirect_count,
            "body": record.http.body,
            "headers": [list(h) for h in record.http.headers],
        },
    }


def record_from_dict(data: dict[str, Any]) -> ProbeRecord:
    d, w, c, h = data["dns"], data["whois"], data["cert"], data["http"]
    return ProbeRecord(
        domain=data["domain"],
        probed_at=datetime.fromisoformat(data["probed_at"]),
        dns=DnsObservation(
            resolves=d["resolves"],
            addresses=list(d["addresses"]),
            nameserver_hosts=list(d["nameserver_hosts"]),
            nameserver_addresses={k: list(v) for k, v in d["nameserver_addresses"].items()},
        ),
        whois=WhoisObservation(
            available=w["available"],
            registrar=w["registrar"],
            registrant_org=w["registrant_org"],
            registrant_country=w["registrant_country"],
            created=_parse_date(w["created"]),
            updated=_parse_date(w["updated"]),
            expires=_parse_date(w["expires"]),
            raw_text=w["raw_text"],
        ),
        cert=CertObservation(
            available=c["available"],
            subject_cn=c["subject_cn"],
            subject_org=c["subject_org"],
            issuer_name=c["issuer_name"],
            issuer_country=c["issuer_country"],
            san_entries=list(c["san_entries"]),
            not_before=_parse_date(c["not_before"]),
            not_after=_parse_date(c["not_after"]),
            self_signed=c["self_signed"],
            parse_error=c["parse_error"],
        ),
        http=HttpObservation(
            available=h["available"],
            final_url=h["final_url"],
            status=h["status"],
            redirect_count=h["redirect_count"],
            body=h["body"],
            headers=[tuple(x) for x in h["headers"]],
        ),
    )


def record_to_json(record: ProbeRecord) -> str:
    return json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":"))


# --- WHOIS parsing -----------------------------------------------------------

_WHOIS_DATE_FORMATS = (
    "%Y-%m-%dT%H:%M:%S%z",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d",
    "%d-%b-%Y",
    "%d.%m.%Y",
    "%Y.%m.%d",
    "%Y/%m/%d",
    "%d/%m/%Y",
    "%Y%m%d",
    "%d %b %Y",
    "%B %d %Y",
)


def _parse_whois_date(value: str) -> date | None:
    value = value.strip()
    # trailing zone designators confuse strptime; normalize the common ones
    cleaned = re.sub(r"\s+(UTC|GMT|Z)$", "", value, flags=re.IGNORECASE)
    cleaned = cleaned.replace("Z", "+0000").replace("T24:", "T00:")
    for candidate in (cleaned, value):
        for fmt in _WHOIS_DATE_FORMATS:
            try:
                return datetime.strptime(candidate, fmt).date()
            except ValueError:
                continue
    # last resort: a leading ISO date prefix
    match = re.match(r"(\d{4}-\d{2}-\d{2})", value)
    if match:
        try:
            return date.fromisoformat(match.group(1))
        except ValueError:
            return None
    return None


def parse_whois(raw: str, aliases: dict[str, tuple[str, ...]] | None = None) -> WhoisObservation:
    """Extract registrar/registrant/date fields from a raw WHOIS response.

    Matching is case-insensitive on ``key: value`` lines against the bundled
    alias table; the first hit per field wins. Unparseable values leave the
    field absent. Input that yields no recognized field is unavailable.
    """
    if aliases is None:
        aliases = datafiles.whois_aliases()
    obs = WhoisObservation(raw_text=raw or "")
    if not raw:
        return obs

    fields: dict[str, str] = {}
    dates: dict[str, date] = {}
    for line in raw.splitlines():
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        key = key.strip().lower().lstrip(">").strip()
        value = value.strip()
        if not value:
            continue
        for field_name, names in aliases.items():
            if field_name in fields or field_name in dates:
                continue
            if key in names:
                if field_name in ("created", "updated", "expires"):
                    parsed = _parse_whois_date(value)
                    if parsed is not None:
                        dates[field_name] = parsed
                else:
                    fields[field_name] = value

    obs.registrar = fields.get("registrar")
    obs.registrant_org = fields.get("registrant_org")
    obs.registrant_country = fields.get("registrant_country")
    obs.created = dates.get("created")
    obs.updated = dates.get("updated")
    obs.expires = dates.get("expires")
    obs.available = bool(fields or dates)
    if not obs.available:
        obs.raw_text = raw
    return obs


# --- certificate parsing -----------------------------------------------------

def _name_attr(name: x509.Name, oid) -> str | None:
    attrs = name.get_attributes_for_oid(oid)
    if not attrs:
        return None
    value = attrs[0].value
    return value if isinstance(value, str) else value.decode("utf-8", "replace")


def parse_certificate(leaf: bytes) -> CertObservation:
    """Parse a DER-encoded leaf certificate into a CertObservation.

    Total over arbitrary bytes: undecodable input yields available=True with
    parse_error=True and no optional fields.
    """
    obs = CertObservation(available=True)
    try:
        cert = x509.load_der_x509_certificate(leaf)
    except Exception:
        obs.parse_error = True
        return obs

    from cryptography.x509.oid import NameOID

    try:
        obs.subject_cn = _name_attr(cert.subject, NameOID.COMMON_NAME)
        obs.subject_org = _name_attr(cert.subject, NameOID.ORGANIZATION_NAME)
        issuer_org = _name_attr(cert.issuer, NameOID.ORGANIZATION_NAME)
        issuer_cn = _name_attr(cert.issuer, NameOID.COMMON_NAME)
        obs.issuer_name = issuer_org or issuer_cn
        obs.issuer_country = _name_attr(cert.issuer, NameOID.COUNTRY_NAME)
        obs.self_signed = cert.issuer == cert.subject
    except Exception:
        obs.parse_error = True

    try:
        obs.not_before = cert.not_valid_before_utc.date()
        obs.not_after = cert.not_valid_after_utc.date()
    except Exception:
        obs.parse_error = True

    try:
        san = cert.extensions.get_extension_for_class(x509.SubjectAlternativeName)
        obs.san_entries = [str(v) for v in san.value.get_values_for_type(x509.DNSName)]
    except x509.ExtensionNotFound:
        obs.san_entries = []
    except Exception:
        obs.parse_error = True

    return obs


# --- probing -----------------------------------------------------------------

def _call_with_timeout(fn: Callable[[], Any], timeout: float) -> Any:
    """Run fn in a daemon thread; a stall past the timeout reads as failure."""
    result: list[Any] = [None]
    error: list[BaseException | None] = [None]

    def run():
        try:
            result[0] = fn()
        except BaseException as exc:  # recorded, surfaced as unavailable
            error[0] = exc

    thread = threading.Thread(target=run, daemon=True)
    thread.start()
    thread.join(timeout)
    if thread.is_alive() or error[0] is not None:
        return None
    return result[0]


def probe_domain(domain: str, transport, limits: ProbeLimits | None = None) -> ProbeRecord:
    """Collect DNS/WHOIS/TLS/HTTP observations for one domain.

    Each sub-probe that fails, stalls, or has no data is recorded as an
    unavailable section; the record itself is always produced.
    """
    if limits is None:
        limits = ProbeLimits()

    probed_at = transport.now()

    dns_raw = _call_with_timeout(lambda: transport.lookup_dns(domain), limits.timeout)
    dns = DnsObservation()
    if isinstance(dns_raw, dict):
        addresses = [str(a) for a in dns_raw.get("addresses", [])]
        dns.resolves = bool(addresses)
        dns.addresses = addresses if dns.resolves else []
        dns.nameserver_hosts = [str(h).lower().rstrip(".") for h in dns_raw.get("nameserver_hosts", [])]
        ns_addrs = dns_raw.get("nameserver_addresses", {}) or {}
        dns.nameserver_addresses = {
            host: [str(a) for a in addrs]
            for host, addrs in ((str(h).lower().rstrip("."), v) for h, v in ns_addrs.items())
            if host in dns.nameserver_hosts
        }

    whois_raw = _call_with_timeout(lambda: transport.fetch_whois(domain), limits.timeout)
    whois = parse_whois(whois_raw) if isinstance(whois_raw, str) else WhoisObservation()

    cert_raw = _call_with_timeout(lambda: transport.fetch_certificate(domain), limits.timeout)
    cert = parse_certificate(cert_raw) if isinstance(cert_raw, (bytes, bytearray)) else CertObservation()

    http_raw = _call_with_timeout(
        lambda: transport.fetch_http(domain, limits.redirect_cap, limits.body_cap),
        limits.timeout,
    )
    http = HttpObservation()
    if isinstance(http_raw, dict):
        status = http_raw.get("status")
        http.status = int(status) if status is not None else None
        http.final_url = http_raw.get("final_url")
        http.redirect_count = int(http_raw.get("redirect_count", 0))
        body = http_raw.get("body")
        if isinstance(body, str):
            http.body = body[: limits.body_cap]
        http.headers = [(str(k), str(v)) for k, v in http_raw.get("headers", [])]
        http.available = (
            http.status is not None
            and 200 <= http.status < 300
            and http.redirect_count <= limits.redirect_cap
        )

    return ProbeRecord(domain=domain, probed_at=probed_at, dns=dns, whois=whois, cert=cert, http=http)

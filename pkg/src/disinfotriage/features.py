"""The 33-feature vector and its numeric encoding.

The catalog lists every feature with its group (domain, certificate,
hosting), value type, and importance rank; extraction turns a probe record
plus enrichment into one vector; the encoder turns vectors into fixed-width
numeric rows for the forest. MISSING is represented as None. Boolean
features are always concrete: an unavailable section reads as false for its
booleans and MISSING for its categories and numerics.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, fields as dataclass_fields
from datetime import date, datetime
from typing import Any, Iterable, Sequence

import numpy as np

from . import datafiles, ingest
from .enrich import AsnTable, CmsInfo, GeoTable
from .probe import ProbeRecord


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    group: str  # domain | certificate | hosting | availability
    dtype: str  # bool | count | days | category | category_set
    rank: int   # importance order; availability bits get pseudo-ranks


# Ordered by importance rank; this is the canonical column order everywhere.
CATALOG: tuple[FeatureSpec, ...] = (
    FeatureSpec("news_keywords_in_domain", "domain", "bool", 1),
    FeatureSpec("san_count", "certificate", "count", 2),
    FeatureSpec("domain_name_length", "domain", "count", 3),
    FeatureSpec("wp_plugins", "hosting", "category_set", 4),
    FeatureSpec("website_as", "hosting", "category", 5),
    FeatureSpec("wordpress_cms", "hosting", "bool", 6),
    FeatureSpec("san_wildcard", "certificate", "bool", 7),
    FeatureSpec("news_in_domain", "domain", "bool", 8),
    FeatureSpec("whois_privacy", "domain", "bool", 9),
    FeatureSpec("cert_expired", "certificate", "bool", 10),
    FeatureSpec("registrar_name", "domain", "category", 11),
    FeatureSpec("cert_available", "certificate", "bool", 12),
    FeatureSpec("self_signed", "certificate", "bool", 13),
    FeatureSpec("nameserver_sld", "domain", "category", 14),
    FeatureSpec("wp_theme", "hosting", "category", 15),
    FeatureSpec("nameserver_as", "domain", "category", 16),
    FeatureSpec("registrant_org", "domain", "category", 17),
    FeatureSpec("domain_validated", "certificate", "bool", 18),
    FeatureSpec("registrant_country", "domain", "category", 19),
    FeatureSpec("website_country", "hosting", "category", 20),
    FeatureSpec("time_since_registration", "domain", "days", 21),
    FeatureSpec("domain_lifespan", "domain", "days", 22),
    FeatureSpec("time_to_expiration", "domain", "days", 23),
    FeatureSpec("issuer_name", "certificate", "category", 24),
    FeatureSpec("time_since_update", "domain", "days", 25),
    FeatureSpec("issuer_country", "certificate", "category", 26),
    FeatureSpec("nameserver_country", "domain", "category", 27),
    FeatureSpec("cert_lifetime", "certificate", "days", 28),
    FeatureSpec("novelty_tld", "domain", "bool", 29),
    FeatureSpec("digit_in_domain", "domain", "bool", 30),
    FeatureSpec("hyphen_in_domain", "domain", "bool", 31),
    FeatureSpec("domain_resolves", "domain", "bool", 32),
    FeatureSpec("website_available", "hosting", "bool", 33),
    FeatureSpec("whois_data_present", "availability", "bool", 34),
    FeatureSpec("cert_data_present", "availability", "bool", 35),
    FeatureSpec("hosting_data_present", "availability", "bool", 36),
)

FEATURE_NAMES: tuple[str, ...] = tuple(s.name for s in CATALOG)
SPEC_BY_NAME: dict[str, FeatureSpec] = {s.name: s for s in CATALOG}
RANKED_FEATURE_COUNT = 33  # catalog rows with a real importance rank; the rest are bookkeeping bits


@dataclass(frozen=True)
class FeatureVector:
    # domain
    news_keywords_in_domain: bool = False
    domain_name_length: int | None = None
    news_in_domain: bool = False
    whois_privacy: bool = False
    registrar_name: str | None = None
    nameserver_sld: str | None = None
    nameserver_as: str | None = None
    registrant_org: str | None = None
    registrant_country: str | None = None
    time_since_registration: int | None = None
    domain_lifespan: int | None = None
    time_to_expiration: int | None = None
    time_since_update: int | None = None
    nameserver_country: str | None = None
    novelty_tld: bool = False
    digit_in_domain: bool = False
    hyphen_in_domain: bool = False
    domain_resolves: bool = False
    # certificate
    san_count: int | None = None
    san_wildcard: bool = False
    cert_expired: bool = False
    cert_available: bool = False
    self_signed: bool = False
    domain_validated: bool = False
    issuer_name: str | None = None
    issuer_country: str | None = None
    cert_lifetime: int | None = None
    # hosting
    wp_plugins: frozenset[str] | None = None
    website_as: str | None = None
    wordpress_cms: bool = False
    wp_theme: str | None = None
    website_country: str | None = None
    website_available: bool = False
    # section availability
    whois_data_present: bool = False
    cert_data_present: bool = False
    hosting_data_present: bool = False

    def value(self, name: str):
        return getattr(self, name)


assert {f.name for f in dataclass_fields(FeatureVector)} == set(FEATURE_NAMES)


# --- extraction ---------------------------------------------------------

def _days(later: date | None, earlier: date | None) -> int | None:
    """Whole days between two dates, clamped at zero; MISSING propagates."""
    if later is None or earlier is None:
        return None
    return max(0, (later - earlier).days)


def _smallest_ip(addresses: Iterable[str]) -> str | None:
    parsed = []
    for addr in addresses:
        try:
            parsed.append(ipaddress.ip_address(addr))
        except ValueError:
            continue
    if not parsed:
        return None
    return str(min(parsed, key=lambda a: (a.version, int(a))))


def _as_token(ip: str | None, table: AsnTable | None) -> str | None:
    if ip is None or table is None:
        return None
    hit = table.lookup(ip)
    return f"AS{hit[0]}" if hit else None


def _country(ip: str | None, table: GeoTable | None) -> str | None:
    if ip is None or table is None:
        return None
    return table.lookup(ip)


def extract(
    record: ProbeRecord,
    cms: CmsInfo,
    asn_table: AsnTable | None,
    geo_table: GeoTable | None,
    now: datetime,
) -> FeatureVector:
    """Build the feature vector for one probe record.

    Total: any absent observation turns into MISSING (categories, numerics)
    or false (booleans). Lexical features use the lowercased registrable
    domain; the two keyword tests ignore the public suffix; time features
    are whole days relative to `now`.
    """
    domain = record.domain.lower()
    today = now.date()

    try:
        label_part = ingest.strip_public_suffix(domain)
        suffix = ingest.public_suffix_of(domain)
    except Exception:
        label_part, suffix = domain, ""

    keywords = datafiles.news_keywords()
    news_keywords_in_domain = any(k in label_part for k in keywords)
    news_in_domain = "news" in label_part
    novelty_tld = suffix in datafiles.novelty_tlds()

    whois = record.whois
    whois_privacy = False
    if whois.registrant_org:
        org = whois.registrant_org.lower()
        whois_privacy = any(k in org for k in datafiles.proxy_keywords())

    # nameserver features come from the lexicographically smallest host
    ns_sld = ns_as = ns_country = None
    if record.dns.nameserver_hosts:
        host = min(record.dns.nameserver_hosts)
        try:
            ns_sld = ingest.registrable_domain(host)
        except Exception:
            ns_sld = None
        ns_ip = _smallest_ip(record.dns.nameserver_addresses.get(host, []))
        ns_as = _as_token(ns_ip, asn_table)
        ns_country = _country(ns_ip, geo_table)

    cert = record.cert
    cert_parsed = cert.available and not cert.parse_error
    san_count = len(cert.san_entries) if cert_parsed else None
    san_wildcard = cert_parsed and any(e.startswith("*.") for e in cert.san_entries)
    cert_expired = bool(cert_parsed and cert.not_after and cert.not_after < today)
    # no subject organization reads as domain-validated issuance
    domain_validated = cert_parsed and cert.subject_org is None
    cert_lifetime = _days(cert.not_after, cert.not_before) if cert_parsed else None

    site_ip = _smallest_ip(record.dns.addresses) if record.dns.resolves else None

    http_ok = record.http.available
    return FeatureVector(
        news_keywords_in_domain=news_keywords_in_domain,
        domain_name_length=len(domain),
        news_in_domain=news_in_domain,
        whois_privacy=whois_privacy,
        registrar_name=whois.registrar,
        nameserver_sld=ns_sld,
        nameserver_as=ns_as,
        registrant_org=whois.registrant_org,
        registrant_country=whois.registrant_country,
        time_since_registration=_days(today, whois.created),
        domain_lifespan=_days(whois.expires, whois.created),
        time_to_expiration=_days(whois.expires, today),
        time_since_update=_days(today, whois.updated),
        nameserver_country=ns_country,
        novelty_tld=novelty_tld,
        digit_in_domain=any(c.isdigit() for c in domain),
        hyphen_in_domain="-" in domain,
        domain_resolves=record.dns.resolves,
        san_count=san_count,
        san_wildcard=san_wildcard,
        cert_expired=cert_expired,
        cert_available=cert.available,
        self_signed=bool(cert_parsed and cert.self_signed),
        domain_validated=domain_validated,
        issuer_name=cert.issuer_name if cert_parsed else None,
        issuer_country=cert.issuer_country if cert_parsed else None,
        cert_lifetime=cert_lifetime,
        wp_plugins=frozenset(cms.plugins) if http_ok else None,
        website_as=_as_token(site_ip, asn_table),
        wordpress_cms=bool(http_ok and cms.wordpress),
        wp_theme=cms.theme if http_ok else None,
        website_country=_country(site_ip, geo_table),
        website_available=http_ok,
        whois_data_present=whois.available,
        cert_data_present=cert.available,
        hosting_data_present=http_ok,
    )


# --- feature-set masks ----------------------------------------------------

FEATURE_SETS = ("domain", "domain_cert", "all")


def category_mask(feature_set: str) -> frozenset[int]:
    """Catalog indices for an ablation feature set.

    domain: the 18 domain features plus the WHOIS availability bit;
    domain_cert adds the 9 certificate features and their bit; all is
    everything.
    """
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {feature_set!r}")
    groups = {"domain"}
    names = {"whois_data_present"}
    if feature_set in ("domain_cert", "all"):
        groups.add("certificate")
        names.add("cert_data_present")
    if feature_set == "all":
        groups.add("hosting")
        names.add("hosting_data_present")
    return frozenset(
        i for i, spec in enumerate(CATALOG) if spec.group in groups or spec.name in names
    )


def encoded_mask(encoder: "Encoder", feature_set: str) -> frozenset[int]:
    """Encoder column indices belonging to a feature set; trains ablations."""
    keep = {CATALOG[i].name for i in category_mask(feature_set)}
    return frozenset(j for j, src in enumerate(encoder.column_source) if src in keep)


# --- encoding ------------------------------------------------------------

class Encoder:
    """Fixed-width numeric encoding fitted on training vectors.

    Per categorical feature: one-hot over the top-K vocabulary plus OTHER
    and MISSING columns. Category sets get a multi-hot over their token
    vocabulary plus OTHER/MISSING bits. Numerics carry a -1 sentinel and a
    companion present-bit. Booleans are single 0/1 columns.
    """

    def __init__(self, vocabularies: dict[str, list[str]], k: int):
        self.k = k
        self.vocabularies = {name: list(vocab) for name, vocab in vocabularies.items()}
        self.column_names: list[str] = []
        self.column_source: list[str] = []
        for spec in CATALOG:
            if spec.dtype == "bool":
                self._add(spec.name, spec.name)
            elif spec.dtype in ("count", "days"):
                self._add(spec.name, spec.name)
                self._add(f"{spec.name}:present", spec.name)
            else:
                for token in self.vocabularies[spec.name]:
                    self._add(f"{spec.name}={token}", spec.name)
                self._add(f"{spec.name}=OTHER", spec.name)
                self._add(f"{spec.name}=MISSING", spec.name)
        self._index = {name: i for i, name in enumerate(self.column_names)}

    def _add(self, column: str, source: str):
        self.column_names.append(column)
        self.column_source.append(source)

    @property
    def width(self) -> int:
        return len(self.column_names)

    def transform(self, vector: FeatureVector) -> np.ndarray:
        row = np.zeros(self.width, dtype=np.float64)
        for spec in CATALOG:
            value = vector.value(spec.name)
            if spec.dtype == "bool":
                row[self._index[spec.name]] = 1.0 if value else 0.0
            elif spec.dtype in ("count", "days"):
                if value is None:
                    row[self._index[spec.name]] = -1.0
                else:
                    row[self._index[spec.name]] = float(value)
                    row[self._index[f"{spec.name}:present"]] = 1.0
            elif spec.dtype == "category":
                if value is None:
                    row[self._index[f"{spec.name}=MISSING"]] = 1.0
                elif value in self.vocabularies[spec.name]:
                    row[self._index[f"{spec.name}={value}"]] = 1.0
                else:
                    row[self._index[f"{spec.name}=OTHER"]] = 1.0
            else:  # category_set
                if value is None:
                    row[self._index[f"{spec.name}=MISSING"]] = 1.0
                else:
                    vocab = self.vocabularies[spec.name]
                    for token in value:
                        if token in vocab:
                            row[self._index[f"{spec.name}={token}"]] = 1.0
                        else:
                            row[self._index[f"{spec.name}=OTHER"]] = 1.0
        return row

    def transform_many(self, vectors: Sequence[FeatureVector]) -> np.ndarray:
        if not vectors:
            return np.zeros((0, self.width), dtype=np.float64)
        return np.stack([self.transform(v) for v in vectors])

    def columns_for(self, feature_indices: Iterable[int]) -> np.ndarray:
        names = {CATALOG[i].name for i in feature_indices}
        return np.array(
            [i for i, source in enumerate(self.column_source) if source in names],
            dtype=np.intp,
        )

    def source_of(self, column: int) -> str:
        return self.column_source[column]

    def to_dict(self) -> dict[str, Any]:
        return {"k": self.k, "vocabularies": self.vocabularies}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Encoder":
        return cls(data["vocabularies"], data["k"])


def fit_encoder(train: Sequence[FeatureVector], k: int = 30) -> Encoder:
    """Vocabulary = the k most frequent non-MISSING categories, ties broken
    lexicographically; stored sorted so column order is deterministic."""
    if not train:
        raise ValueError("training set is empty")
    if k < 1:
        raise ValueError("k must be >= 1")

    vocabularies: dict[str, list[str]] = {}
    for spec in CATALOG:
        if spec.dtype not in ("category", "category_set"):
            continue
        counts: dict[str, int] = {}
        for vector in train:
            value = vector.value(spec.name)
            if value is None:
                continue
            tokens = value if spec.dtype == "category_set" else (value,)
            for token in tokens:
                counts[token] = counts.get(token, 0) + 1
        top = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
        vocabularies[spec.name] = sorted(token for token, _ in top)
    return Encoder(vocabularies, k)


# --- serialization ---------------------------------------------------------

CSV_HEADER: tuple[str, ...] = FEATURE_NAMES
_SET_SEP = "|"


def vector_to_csv_row(vector: FeatureVector) -> list[str]:
    row = []
    for spec in CATALOG:
        value = vector.value(spec.name)
        if spec.dtype == "bool":
            row.append("true" if value else "false")
        elif value is None:
            row.append("")
        elif spec.dtype in ("count", "days"):
            row.append(str(int(value)))
        elif spec.dtype == "category":
            row.append(value)
        else:
            row.append(_SET_SEP.join(sorted(value)))
    return row


def vector_from_csv_row(row: Sequence[str]) -> FeatureVector:
    if len(row) != len(CATALOG):
        raise ValueError(f"expected {len(CATALOG)} cells, got {len(row)}")
    values: dict[str, Any] = {}
    for spec, cell in zip(CATALOG, row):
        if spec.dtype == "bool":
            values[spec.name] = cell == "true"
        elif spec.dtype in ("count", "days"):
            values[spec.name] = int(cell) if cell else None
        elif spec.dtype == "category":
            values[spec.name] = cell or None
        else:
            values[spec.name] = frozenset(cell.split(_SET_SEP)) if cell else None
    # an empty plugin set and MISSING both serialize to an empty cell; the
    # availability bit restores the distinction
    if values["hosting_data_present"] and values["wp_plugins"] is None:
        values["wp_plugins"] = frozenset()
    return FeatureVector(**values)


def vector_to_dict(vector: FeatureVector) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for spec in CATALOG:
        value = vector.value(spec.name)
        if spec.dtype == "category_set" and value is not None:
            value = sorted(value)
        out[spec.name] = value
    return out


def vector_from_dict(data: dict[str, Any]) -> FeatureVector:
    values: dict[str, Any] = {}
    for spec in CATALOG:
        value = data[spec.name]
        if spec.dtype == "category_set" and value is not None:
            value = frozenset(value)
        values[spec.name] = value
    return FeatureVector(**values)

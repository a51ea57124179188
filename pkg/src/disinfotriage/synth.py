"""Synthetic labeled corpus generator.

Probe corpora with ground-truth labels cannot ship with the repository, so
model development, regression tests, and the bundled demo model train on a
generated stand-in. Each class draws its field values from distributions
anchored to the contrasts the classifier actually exploits in production
triage: disinformation sites skew toward WordPress installs (~0.82 vs ~0.20
for legitimate news), WHOIS privacy services (~0.57 vs ~0.09), short and
recent registrations, retail registrars, two-entry domain-validated
certificates, and bulk hosting; news organizations skew toward corporate
registrars, decade-old registrations, organization-validated certificates
with large SAN lists, and enterprise DNS. Every pool deliberately leaks
across classes (news outlets on GoDaddy, hobby sites behind WHOIS privacy,
disinformation on a CDN) so the classes overlap the way real corpora do
instead of being separable by any single field.

The categorical pools double as the vocabulary for the bundled probe
fixtures: fixtures reuse these registrars, issuers, and AS tokens so an
encoder fitted on generated data recognizes fixture-derived vectors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import datafiles, ingest
from .features import FeatureVector
from .store import LabeledExample, dataset_save

# Echoes FIXTURE_CLOCK in transport.py; dataset rows carry a fixed labeling
# timestamp so regeneration is byte-identical.
LABELED_AT = "2026-01-15T12:00:00Z"

# --- shared categorical pools (also used by the probe fixture corpus) ------

DISINFO_REGISTRARS = (
    ("GoDaddy.com, LLC", 0.44),
    ("NameCheap, Inc.", 0.20),
    ("eNom, LLC", 0.11),
    ("PDR Ltd.", 0.08),
    ("Network Solutions, LLC", 0.06),
    ("Tucows Domains Inc.", 0.05),
    ("Google LLC", 0.04),
    ("Gandi SAS", 0.02),
)
NEWS_REGISTRARS = (
    ("Network Solutions, LLC", 0.26),
    ("MarkMonitor Inc.", 0.22),
    ("CSC Corporate Domains, Inc.", 0.18),
    ("GoDaddy.com, LLC", 0.20),
    ("Tucows Domains Inc.", 0.08),
    ("NameCheap, Inc.", 0.06),
)
OTHER_REGISTRARS = (
    ("GoDaddy.com, LLC", 0.30),
    ("Tucows Domains Inc.", 0.16),
    ("NameCheap, Inc.", 0.15),
    ("Google LLC", 0.12),
    ("Network Solutions, LLC", 0.10),
    ("Gandi SAS", 0.08),
    ("eNom, LLC", 0.07),
    ("MarkMonitor Inc.", 0.02),
)

PRIVACY_ORGS = (
    "Domains By Proxy, LLC",
    "WhoisGuard Protected",
    "Privacy Protect, LLC",
    "Redacted for Privacy",
    "Whois Privacy Service",
)
NEWS_ORGS = (
    "Gannett Media Corp",
    "Tribune Publishing Company",
    "Hearst Communications Inc",
    "Lee Enterprises Inc",
    "Sinclair Broadcast Group",
)
OTHER_ORGS = (
    "Blue Widget Labs LLC",
    "Cascade Outfitters Inc",
    "Maple Leaf Hobbies Ltd",
    "Sunrise Dental Group",
    "Harbor Light Media",
)

DISINFO_ISSUERS = (
    ("Let's Encrypt", 0.72),
    ("cPanel, Inc.", 0.12),
    ("Sectigo Limited", 0.10),
    ("DigiCert Inc", 0.04),
    ("GlobalSign nv-sa", 0.02),
)
NEWS_ISSUERS = (
    ("DigiCert Inc", 0.50),
    ("Entrust, Inc.", 0.20),
    ("GlobalSign nv-sa", 0.20),
    ("Let's Encrypt", 0.08),
    ("cPanel, Inc.", 0.02),
)
OTHER_ISSUERS = (
    ("Let's Encrypt", 0.45),
    ("Sectigo Limited", 0.18),
    ("DigiCert Inc", 0.15),
    ("cPanel, Inc.", 0.12),
    ("GlobalSign nv-sa", 0.10),
)
ISSUER_COUNTRY = {
    "Let's Encrypt": "US",
    "cPanel, Inc.": "US",
    "Sectigo Limited": "GB",
    "DigiCert Inc": "US",
    "Entrust, Inc.": "CA",
    "GlobalSign nv-sa": "BE",
}

DISINFO_AS = (
    ("AS64500", 0.34),
    ("AS64501", 0.20),
    ("AS64502", 0.18),
    ("AS64510", 0.14),
    ("AS64520", 0.08),
    ("AS64600", 0.06),
)
NEWS_AS = (("AS64600", 0.38), ("AS64601", 0.30), ("AS64602", 0.24), ("AS64520", 0.06), ("AS64500", 0.02))
OTHER_AS = (
    ("AS64520", 0.22),
    ("AS64521", 0.18),
    ("AS64522", 0.16),
    ("AS64500", 0.14),
    ("AS64600", 0.10),
    ("AS64523", 0.10),
    ("AS64524", 0.10),
)

DISINFO_NS = (
    ("domaincontrol.com", 0.42),
    ("registrar-servers.com", 0.28),
    ("orderbox-dns.com", 0.14),
    ("cloudflare.com", 0.12),
    ("awsdns-10.org", 0.04),
)
NEWS_NS = (
    ("akam.net", 0.30),
    ("ultradns.net", 0.22),
    ("cscdns.net", 0.22),
    ("dynect.net", 0.12),
    ("cloudflare.com", 0.10),
    ("domaincontrol.com", 0.04),
)
OTHER_NS = (
    ("cloudflare.com", 0.28),
    ("awsdns-10.org", 0.22),
    ("googledomains.com", 0.18),
    ("domaincontrol.com", 0.14),
    ("name-services.com", 0.12),
    ("akam.net", 0.06),
)
# Nameserver operators pin their own AS and country.
NS_INFO = {
    "domaincontrol.com": ("AS64701", "US"),
    "registrar-servers.com": ("AS64702", "US"),
    "orderbox-dns.com": ("AS64703", "IN"),
    "cloudflare.com": ("AS64704", "US"),
    "akam.net": ("AS64711", "US"),
    "ultradns.net": ("AS64712", "US"),
    "cscdns.net": ("AS64713", "US"),
    "dynect.net": ("AS64714", "US"),
    "awsdns-10.org": ("AS64715", "US"),
    "name-services.com": ("AS64716", "US"),
    "googledomains.com": ("AS64717", "US"),
}

DISINFO_PLUGINS = ("seo", "jetpack", "contact-form-7", "wp-super-cache", "wordpress-seo")
NEWS_PLUGINS = ("jetpack", "akismet", "wordpress-seo")
OTHER_PLUGINS = ("elementor", "woocommerce", "akismet", "jetpack", "contact-form-7")

DISINFO_THEMES = (("Newspaper", 0.38), ("mh-magazine", 0.26), ("Newsmag", 0.20), ("mts_best", 0.10), ("astra", 0.06))
NEWS_THEMES = (("largo", 0.40), ("newspack-theme", 0.30), ("twentytwenty", 0.16), ("astra", 0.14))
OTHER_THEMES = (
    ("astra", 0.30),
    ("oceanwp", 0.24),
    ("hello-elementor", 0.20),
    ("twentytwentyone", 0.16),
    ("Newspaper", 0.10),
)

# --- domain-name templates --------------------------------------------------

_DISINFO_PREFIXES = (
    "channel", "breaking", "viral", "patriot", "liberty", "real", "true",
    "global", "national", "usa", "insider", "first", "top",
)
_DISINFO_WORDS = (
    "news", "herald", "post", "report", "times", "journal", "wire",
    "bulletin", "daily", "press", "headline",
)
_NEWS_TOWNS = (
    "springfield", "lakeside", "riverton", "rivervale", "brookfield",
    "oakdale", "madisonville", "georgetown", "hamilton", "clayton",
    "arlington", "dover", "bellmont", "kingsport", "westbrook",
)
_NEWS_WORDS = (
    "herald", "times", "post", "gazette", "tribune", "chronicle",
    "observer", "journal", "news", "daily",
)
_NEWS_BRANDS = ("apexion", "veridia", "corvant", "luminary", "meridian")
_OTHER_WORDS = (
    "garden", "recipe", "travel", "yoga", "craft", "bike", "coffee",
    "puzzle", "hiking", "pottery", "chess", "guitar", "bakery", "vintage",
    "harbor", "meadow", "cedar", "willow", "acorn", "marble", "copper",
    "linen", "orchid", "summit", "prairie",
)
_OTHER_TAILS = ("hub", "spot", "stack", "nest", "loft", "studio", "works", "corner")

_DISINFO_TLDS = (
    ("com", 0.45), ("info", 0.10), ("net", 0.06), ("org", 0.04),
    ("xyz", 0.09), ("news", 0.07), ("site", 0.06), ("online", 0.05),
    ("club", 0.04), ("buzz", 0.02), ("icu", 0.01), ("top", 0.01),
)
_NEWS_TLDS = (("com", 0.82), ("org", 0.12), ("co.uk", 0.04), ("net", 0.02))
_OTHER_TLDS = (
    ("com", 0.56), ("net", 0.10), ("org", 0.08), ("io", 0.07), ("co", 0.05),
    ("xyz", 0.05), ("site", 0.04), ("online", 0.03), ("top", 0.02),
)


def _pick(rng: np.random.Generator, pairs):
    """Weighted draw from (value, weight) pairs."""
    weights = np.array([w for _, w in pairs], dtype=float)
    idx = int(rng.choice(len(pairs), p=weights / weights.sum()))
    return pairs[idx][0]


def _uniform(rng: np.random.Generator, values):
    return values[int(rng.integers(0, len(values)))]


def _chance(rng: np.random.Generator, p: float) -> bool:
    return float(rng.random()) < p


class _Namer:
    """Builds unique domain names; collisions get a letter-only suffix so
    digit/hyphen features stay controlled by the templates."""

    _LETTERS = "abcdefghijklmnopqrstuvwxyz"

    def __init__(self):
        self.seen: set[str] = set()

    def claim(self, rng: np.random.Generator, stem: str, tld: str) -> str:
        domain = f"{stem}.{tld}"
        while domain in self.seen:
            pad = "".join(_uniform(rng, self._LETTERS) for _ in range(2))
            domain = f"{stem}{pad}.{tld}"
        self.seen.add(domain)
        return domain


def _disinfo_domain(rng, namer: _Namer) -> str:
    stem = _uniform(rng, _DISINFO_PREFIXES) + _uniform(rng, _DISINFO_WORDS)
    if _chance(rng, 0.45):
        stem = f"{stem}{int(rng.integers(10, 100))}"
    if _chance(rng, 0.30):
        stem = f"{_uniform(rng, _DISINFO_PREFIXES)}-{stem}"
    return namer.claim(rng, stem, _pick(rng, _DISINFO_TLDS))


def _news_domain(rng, namer: _Namer) -> str:
    if _chance(rng, 0.15):
        stem = _uniform(rng, _NEWS_BRANDS)  # brand names without a news word
    else:
        stem = _uniform(rng, _NEWS_TOWNS) + _uniform(rng, _NEWS_WORDS)
    return namer.claim(rng, stem, _pick(rng, _NEWS_TLDS))


def _other_domain(rng, namer: _Namer) -> str:
    keywords = datafiles.news_keywords()
    stem = ""
    for _ in range(20):
        stem = _uniform(rng, _OTHER_WORDS) + _uniform(rng, _OTHER_TAILS)
        if _chance(rng, 0.20):
            stem = f"{_uniform(rng, _OTHER_WORDS)}-{stem}"
        if _chance(rng, 0.15):
            stem = f"{stem}{int(rng.integers(1, 10))}"
        if not any(k in stem for k in keywords):
            break
    if _chance(rng, 0.10):
        stem = stem + _uniform(rng, _DISINFO_WORDS)  # occasional keyword hit
    return namer.claim(rng, stem, _pick(rng, _OTHER_TLDS))


# --- per-class field profiles ----------------------------------------------


def _lexical_fields(domain: str) -> dict:
    stem = ingest.strip_public_suffix(domain)
    suffix = ingest.public_suffix_of(domain)
    keywords = datafiles.news_keywords()
    return {
        "news_keywords_in_domain": any(k in stem for k in keywords),
        "news_in_domain": "news" in stem,
        "domain_name_length": len(domain),
        "novelty_tld": suffix in datafiles.novelty_tlds(),
        "digit_in_domain": any(c.isdigit() for c in domain),
        "hyphen_in_domain": "-" in domain,
    }


def _year_span(rng, year_pairs, jitter: int = 30) -> int:
    """Registration lifespans come in whole years plus a little drift."""
    return int(_pick(rng, year_pairs)) * 365 + int(rng.integers(0, jitter))


def _whois_fields(rng, *, present_p, privacy_p, registrars, orgs, countries,
                  lifespan_fn, since_frac, update_fn) -> dict:
    if not _chance(rng, present_p):
        return {
            "whois_data_present": False,
            "whois_privacy": False,
            "registrar_name": None,
            "registrant_org": None,
            "registrant_country": None,
            "time_since_registration": None,
            "domain_lifespan": None,
            "time_to_expiration": None,
            "time_since_update": None,
        }
    private = _chance(rng, privacy_p)
    if private:
        org = _uniform(rng, PRIVACY_ORGS)
        country = _pick(rng, (("PA", 0.5), ("US", 0.3), ("IS", 0.2)))
    else:
        org = _uniform(rng, orgs) if _chance(rng, 0.8) else None
        country = _pick(rng, countries)
    lifespan = lifespan_fn(rng)
    lo, hi = since_frac
    since = int(lifespan * float(rng.uniform(lo, hi)))
    return {
        "whois_data_present": True,
        "whois_privacy": private,
        "registrar_name": _pick(rng, registrars),
        "registrant_org": org,
        "registrant_country": country,
        "time_since_registration": since,
        "domain_lifespan": lifespan,
        "time_to_expiration": max(lifespan - since, 0),
        "time_since_update": update_fn(rng),
    }


def _cert_fields(rng, domain, *, present_p, issuers, dv_p, self_p, expired_p,
                 wildcard_p, san_fn, lifetime_pairs) -> dict:
    if not _chance(rng, present_p):
        return {
            "cert_data_present": False,
            "cert_available": False,
            "san_count": None,
            "san_wildcard": False,
            "cert_expired": False,
            "self_signed": False,
            "domain_validated": False,
            "issuer_name": None,
            "issuer_country": None,
            "cert_lifetime": None,
        }
    self_signed = _chance(rng, self_p)
    if self_signed:
        issuer, issuer_country = domain, None
        dv = True
    else:
        issuer = _pick(rng, issuers)
        issuer_country = ISSUER_COUNTRY[issuer]
        dv = _chance(rng, dv_p)
    return {
        "cert_data_present": True,
        "cert_available": True,
        "san_count": san_fn(rng),
        "san_wildcard": _chance(rng, wildcard_p),
        "cert_expired": _chance(rng, expired_p),
        "self_signed": self_signed,
        "domain_validated": dv,
        "issuer_name": issuer,
        "issuer_country": issuer_country,
        "cert_lifetime": _pick(rng, lifetime_pairs),
    }


def _hosting_fields(rng, *, present_p, wp_p, plugins, theme_pairs, as_pairs,
                    countries, plugin_counts) -> dict:
    if not _chance(rng, present_p):
        return {
            "hosting_data_present": False,
            "website_available": False,
            "wordpress_cms": False,
            "wp_plugins": None,
            "wp_theme": None,
            "website_as": None,
            "website_country": None,
        }
    wp = _chance(rng, wp_p)
    chosen: frozenset[str] = frozenset()
    theme = None
    if wp:
        count = _pick(rng, plugin_counts)
        picks = rng.choice(len(plugins), size=min(count, len(plugins)), replace=False)
        chosen = frozenset(plugins[int(i)] for i in picks)
        if _chance(rng, 0.85):
            theme = _pick(rng, theme_pairs)
    return {
        "hosting_data_present": True,
        "website_available": True,
        "wordpress_cms": wp,
        "wp_plugins": chosen,
        "wp_theme": theme,
        "website_as": _pick(rng, as_pairs),
        "website_country": _pick(rng, countries),
    }


def _ns_fields(rng, resolves: bool, ns_pairs) -> dict:
    if not resolves:
        return {
            "domain_resolves": False,
            "nameserver_sld": None,
            "nameserver_as": None,
            "nameserver_country": None,
        }
    sld = _pick(rng, ns_pairs)
    ns_as, ns_country = NS_INFO[sld]
    return {
        "domain_resolves": True,
        "nameserver_sld": sld,
        "nameserver_as": ns_as,
        "nameserver_country": ns_country,
    }


def _disinfo_example(rng, namer) -> LabeledExample:
    domain = _disinfo_domain(rng, namer)
    fields = _lexical_fields(domain)
    resolves = _chance(rng, 0.97)
    fields.update(_ns_fields(rng, resolves, DISINFO_NS))
    fields.update(_whois_fields(
        rng,
        present_p=0.88,
        privacy_p=0.57,
        registrars=DISINFO_REGISTRARS,
        orgs=OTHER_ORGS,
        countries=(("US", 0.45), ("RU", 0.15), ("NL", 0.13), ("VG", 0.12),
                   ("CY", 0.08), ("PA", 0.07)),
        lifespan_fn=lambda r: _year_span(
            r, ((1, 0.46), (2, 0.22), (3, 0.12), (int(r.integers(4, 11)), 0.20))),
        since_frac=(0.05, 0.85),
        update_fn=lambda r: int(r.integers(5, 260)),
    ))
    fields.update(_cert_fields(
        rng, domain,
        present_p=0.90 if resolves else 0.0,
        issuers=DISINFO_ISSUERS,
        dv_p=0.88,
        self_p=0.07,
        expired_p=0.12,
        wildcard_p=0.08,
        san_fn=lambda r: int(_pick(r, (
            (2, 0.52), (1, 0.14), (3, 0.14),
            (int(r.integers(4, 13)), 0.14), (int(r.integers(13, 41)), 0.06),
        ))),
        lifetime_pairs=((90, 0.74), (365, 0.18), (398, 0.03), (730, 0.05)),
    ))
    fields.update(_hosting_fields(
        rng,
        present_p=0.92 if resolves else 0.0,
        wp_p=0.82,
        plugins=DISINFO_PLUGINS,
        theme_pairs=DISINFO_THEMES,
        as_pairs=DISINFO_AS,
        countries=(("US", 0.65), ("NL", 0.12), ("DE", 0.08), ("RU", 0.08), ("PA", 0.07)),
        plugin_counts=((1, 0.25), (2, 0.45), (3, 0.30)),
    ))
    return LabeledExample(domain, FeatureVector(**fields), "disinformation",
                          labeled_at=LABELED_AT)


def _news_example(rng, namer) -> LabeledExample:
    domain = _news_domain(rng, namer)
    fields = _lexical_fields(domain)
    resolves = _chance(rng, 0.998)
    fields.update(_ns_fields(rng, resolves, NEWS_NS))
    young = _chance(rng, 0.18)  # recently launched outlets
    fields.update(_whois_fields(
        rng,
        present_p=0.97,
        privacy_p=0.09,
        registrars=NEWS_REGISTRARS,
        orgs=NEWS_ORGS,
        countries=(("US", 0.9), ("GB", 0.1)),
        lifespan_fn=lambda r: _year_span(r, tuple((y, 1.0) for y in range(2, 7)))
        if young else _year_span(r, tuple((y, 1.0) for y in range(8, 27))),
        since_frac=(0.35, 0.9) if young else (0.5, 0.95),
        update_fn=lambda r: int(r.integers(30, 700)),
    ))
    fields.update(_cert_fields(
        rng, domain,
        present_p=0.99 if resolves else 0.0,
        issuers=NEWS_ISSUERS,
        dv_p=0.22,
        self_p=0.0,
        expired_p=0.01,
        wildcard_p=0.45,
        san_fn=lambda r: int(r.integers(6, 61)) if _chance(r, 0.78) else int(r.integers(1, 6)),
        lifetime_pairs=((365, 0.56), (398, 0.24), (730, 0.12), (90, 0.08)),
    ))
    fields.update(_hosting_fields(
        rng,
        present_p=0.99 if resolves else 0.0,
        wp_p=0.20,
        plugins=NEWS_PLUGINS,
        theme_pairs=NEWS_THEMES,
        as_pairs=NEWS_AS,
        countries=(("US", 0.92), ("GB", 0.08)),
        plugin_counts=((1, 0.55), (2, 0.45)),
    ))
    return LabeledExample(domain, FeatureVector(**fields), "news",
                          labeled_at=LABELED_AT)


def _other_example(rng, namer) -> LabeledExample:
    domain = _other_domain(rng, namer)
    fields = _lexical_fields(domain)
    resolves = _chance(rng, 0.95)
    fields.update(_ns_fields(rng, resolves, OTHER_NS))
    fields.update(_whois_fields(
        rng,
        present_p=0.82,
        privacy_p=0.25,
        registrars=OTHER_REGISTRARS,
        orgs=OTHER_ORGS,
        countries=(("US", 0.50), ("DE", 0.12), ("CA", 0.10), ("FR", 0.08),
                   ("AU", 0.08), ("NL", 0.07), ("JP", 0.05)),
        lifespan_fn=lambda r: _year_span(r, tuple((y, 1.0) for y in range(1, 22))),
        since_frac=(0.05, 0.95),
        update_fn=lambda r: int(r.integers(10, 1200)),
    ))
    fields.update(_cert_fields(
        rng, domain,
        present_p=0.85 if resolves else 0.0,
        issuers=OTHER_ISSUERS,
        dv_p=0.70,
        self_p=0.04,
        expired_p=0.06,
        wildcard_p=0.20,
        san_fn=lambda r: int(_pick(r, (
            (int(r.integers(1, 4)), 0.50),
            (int(r.integers(4, 13)), 0.30),
            (int(r.integers(13, 41)), 0.20),
        ))),
        lifetime_pairs=((90, 0.45), (365, 0.35), (398, 0.10), (730, 0.10)),
    ))
    fields.update(_hosting_fields(
        rng,
        present_p=0.88 if resolves else 0.0,
        wp_p=0.35,
        plugins=OTHER_PLUGINS,
        theme_pairs=OTHER_THEMES,
        as_pairs=OTHER_AS,
        countries=(("US", 0.55), ("DE", 0.12), ("CA", 0.09), ("FR", 0.08),
                   ("SG", 0.08), ("AU", 0.08)),
        plugin_counts=((0, 0.20), (1, 0.45), (2, 0.35)),
    ))
    return LabeledExample(domain, FeatureVector(**fields), "other",
                          labeled_at=LABELED_AT)


_BUILDERS = (
    ("disinformation", _disinfo_example),
    ("news", _news_example),
    ("other", _other_example),
)


def generate(per_class: int = 550, seed: int = 0) -> list[LabeledExample]:
    """Deterministic synthetic corpus with `per_class` examples per class.

    Examples come out grouped by class in CLASS_ORDER; the same
    (per_class, seed) pair always yields byte-identical rows.
    """
    rng = np.random.default_rng(seed)
    namer = _Namer()
    out: list[LabeledExample] = []
    for _, build in _BUILDERS:
        for _ in range(per_class):
            out.append(build(rng, namer))
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python3 -m disinfotriage.synth",
        description="Write a synthetic labeled dataset CSV.",
    )
    parser.add_argument("--out", default="dataset.csv", help="output CSV path")
    parser.add_argument("--per-class", type=int, default=550)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    examples = generate(args.per_class, args.seed)
    dataset_save(examples, args.out)
    print(f"wrote {len(examples)} examples to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

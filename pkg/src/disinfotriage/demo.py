"""Build a self-contained replay workspace: probe fixtures for fifty
domains, the three feed files that admit them, ASN and geo tables covering
every fixture address, a synthetic training dataset, a trained model, and a
config file wiring it all together.

The workspace is the runnable demo for the README and the substrate for the
end-to-end tests: `replay` against it archives all fifty domains and leaves
exactly three disinformation candidates in the moderation queue. Categorical
values reuse the synthetic corpus pools so the bundled model's encoder
recognizes fixture-derived vectors.
"""

from __future__ import annotations

import argparse
import ipaddress
import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from cryptography import x509
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.serialization import Encoding
from cryptography.x509.oid import NameOID

from . import synth
from .features import fit_encoder
from .forest import HyperParams, fit_forest
from .store import dataset_save, model_save
from .transport import FIXTURE_CLOCK

# One deterministic key pair for every fixture certificate; these are test
# artifacts, not credentials.
_KEY = ec.derive_private_key(0x1D5A2B7C3E9F4A6B8C0D1E2F30415263, ec.SECP256R1())

# AS number -> (third octet of its 198.18.0.0/16 block, country, operator name)
_AS_BLOCKS = {
    64500: (0, "US", "Bulkgrid Hosting"),
    64501: (1, "US", "Stackpile Internet"),
    64502: (2, "NL", "Lowland Colo"),
    64510: (10, "RU", "Vostok Telecom"),
    64520: (20, "US", "Cloudmesa"),
    64521: (21, "DE", "Rheinnetz"),
    64522: (22, "US", "Bayshore Compute"),
    64523: (23, "CA", "Laurentide Cloud"),
    64524: (24, "FR", "Hexanet"),
    64600: (60, "US", "Edgewave CDN"),
    64601: (61, "US", "Metroline Media Net"),
    64602: (62, "GB", "Albion Digital"),
    64701: (70, "US", "GoDaddy DNS"),
    64702: (71, "US", "Namecheap DNS"),
    64703: (72, "IN", "Orderbox DNS"),
    64704: (73, "US", "Cloudflare DNS"),
    64711: (74, "US", "Akamai DNS"),
    64712: (75, "US", "UltraDNS"),
    64713: (76, "US", "CSC DNS"),
    64714: (77, "US", "Dyn DNS"),
    64715: (78, "US", "AWS Route53"),
    64716: (79, "US", "eNom DNS"),
    64717: (80, "US", "Google DNS"),
}

_NS_AS = {sld: int(info[0][2:]) for sld, info in synth.NS_INFO.items()}


class _IpPlan:
    """Hands out addresses inside each AS block deterministically."""

    def __init__(self):
        self._next = {asn: 10 for asn in _AS_BLOCKS}

    def address(self, asn: int) -> str:
        octet = _AS_BLOCKS[asn][0]
        host = self._next[asn]
        self._next[asn] += 1
        return f"198.18.{octet}.{host}"


def _make_cert(
    subject_cn: str,
    san: list[str],
    *,
    issuer_org: str | None,
    issuer_country: str | None,
    not_before: datetime,
    not_after: datetime,
    subject_org: str | None = None,
    self_signed: bool = False,
) -> bytes:
    subject_attrs = [x509.NameAttribute(NameOID.COMMON_NAME, subject_cn)]
    if subject_org:
        subject_attrs.append(x509.NameAttribute(NameOID.ORGANIZATION_NAME, subject_org))
    subject = x509.Name(subject_attrs)
    if self_signed:
        issuer = subject
    else:
        attrs = [x509.NameAttribute(NameOID.COMMON_NAME, f"{issuer_org} CA")]
        if issuer_org:
            attrs.append(x509.NameAttribute(NameOID.ORGANIZATION_NAME, issuer_org))
        if issuer_country:
            attrs.append(x509.NameAttribute(NameOID.COUNTRY_NAME, issuer_country))
        issuer = x509.Name(attrs)
    builder = (
        x509.CertificateBuilder()
        .subject_name(subject)
        .issuer_name(issuer)
        .public_key(_KEY.public_key())
        .serial_number(x509.random_serial_number())
        .not_valid_before(not_before)
        .not_valid_after(not_after)
        .add_extension(x509.SubjectAlternativeName([x509.DNSName(n) for n in san]), critical=False)
    )
    cert = builder.sign(_KEY, hashes.SHA256())
    return cert.public_bytes(Encoding.PEM)


def _san_list(domain: str, count: int, wildcard: bool = False) -> list[str]:
    names = [f"*.{domain}"] if wildcard else []
    names.append(domain)
    subs = ("www", "m", "news", "media", "cdn", "static", "mail", "app", "api",
            "video", "img", "live", "shop", "search", "edition", "sports",
            "weather", "archive", "events", "jobs", "login", "account",
            "assets", "feeds", "alerts", "local", "beta", "dev", "stage",
            "metrics", "tools", "help", "status", "data", "go", "my", "pro",
            "amp", "es", "fr")
    for sub in subs:
        if len(names) >= count:
            break
        names.append(f"{sub}.{domain}")
    return names[:count]


def _whois_text(domain, registrar, org, country, created, updated, expires) -> str:
    return (
        f"Domain Name: {domain.upper()}\n"
        f"Registrar: {registrar}\n"
        f"Creation Date: {created}T04:00:00Z\n"
        f"Updated Date: {updated}T04:00:00Z\n"
        f"Registry Expiry Date: {expires}T04:00:00Z\n"
        f"Registrant Organization: {org}\n"
        f"Registrant Country: {country}\n"
    )


def _wp_body(theme: str, plugins: tuple[str, ...]) -> str:
    lines = [
        "<html><head>",
        '<meta name="generator" content="WordPress 6.4" />',
        f'<link rel="stylesheet" href="/wp-content/themes/{theme}/style.css" />',
    ]
    for slug in plugins:
        lines.append(f'<script src="/wp-content/plugins/{slug}/js/main.js"></script>')
    lines.append("</head><body><p>latest stories</p></body></html>")
    return "\n".join(lines)


def _plain_body(title: str) -> str:
    return f"<html><head><title>{title}</title></head><body><p>{title}</p></body></html>"


_CLOCK = FIXTURE_CLOCK


def _write_fixture(root: Path, domain: str, spec: dict, ips: _IpPlan):
    """Write dns.json / whois.txt / cert.pem / http.json for one domain."""
    d = root / domain
    d.mkdir(parents=True, exist_ok=True)

    if spec.get("dns", True):
        ns_sld = spec["ns"]
        ns_asn = _NS_AS[ns_sld]
        site_ip = ips.address(spec["asn"])
        ns_ip = ips.address(ns_asn)
        hosts = [f"ns1.{ns_sld}", f"ns2.{ns_sld}"]
        (d / "dns.json").write_text(json.dumps({
            "addresses": [site_ip],
            "nameserver_hosts": hosts,
            "nameserver_addresses": {hosts[0]: [ns_ip], hosts[1]: [ips.address(ns_asn)]},
        }, indent=1))

    if "whois" in spec:
        (d / "whois.txt").write_text(_whois_text(domain, *spec["whois"]))

    cert = spec.get("cert")
    if cert == "garbage":
        (d / "cert.pem").write_bytes(b"this is not a certificate\n")
    elif cert is not None:
        days = cert.get("days", 90)
        end = cert.get("end")  # ISO date string for expired certs
        if end:
            not_after = datetime.fromisoformat(end)
            not_before = not_after - timedelta(days=days)
        else:
            not_before = _CLOCK.replace(tzinfo=None) - timedelta(days=days // 3)
            not_after = not_before + timedelta(days=days)
        (d / "cert.pem").write_bytes(_make_cert(
            domain,
            _san_list(domain, cert.get("san", 2), cert.get("wildcard", False)),
            issuer_org=cert.get("issuer"),
            issuer_country=synth.ISSUER_COUNTRY.get(cert.get("issuer")),
            not_before=not_before,
            not_after=not_after,
            subject_org=cert.get("subject_org"),
            self_signed=cert.get("self_signed", False),
        ))

    http = spec.get("http")
    if http is not None:
        status, body = http
        (d / "http.json").write_text(json.dumps({
            "status": status,
            "final_url": f"https://{domain}/",
            "redirect_count": spec.get("redirects", 0),
            "body": body,
            "headers": [["Content-Type", "text/html"]],
        }))


# --- the fifty-domain corpus --------------------------------------------------

DISINFO_DOMAINS = ("channel24news.com", "empirenews.net", "viral-liberty-report.xyz")

NEWS_DOMAINS = (
    "springfieldherald.com", "lakesidetribune.com", "rivertonchronicle.com",
    "brookfieldgazette.org", "oakdaletimes.com", "georgetownobserver.com",
    "hamiltonpost.com", "claytonjournal.org", "arlingtondaily.com",
    "doverpress.co.uk", "kingsportnews.com", "westbrooktimes.com",
)

# hobby and small-business sites whose names trip the keyword prefilter
KEYWORD_OTHER_DOMAINS = (
    "timesharehub.com", "pressurewash.site", "dailybreadbakery.com",
    "postalsupplies.net", "journalingsupply.com",
)

CERT_FEED_DOMAINS = (
    "gardenhub.com", "recipenest.net", "travelloft.org", "yogaspot.io",
    "craftcorner.com", "bikeworks.net", "coffeenook.com", "puzzleloft.xyz",
    "hikingnest.co", "potteryworks.org", "chessstudio.com", "guitarcorner.net",
    "bakeryspot.com", "vintageloft.com", "harborstudio.net", "meadowworks.com",
    "cedarstack.io", "willownest.org",
)

SOCIAL_FEED_DOMAINS = (
    "acornloft.com", "marblestudio.net", "copperworks.org", "linencorner.com",
    "orchidnest.io", "summitstack.com", "prairieloft.net", "ghostharbor.net",
    "brokenbadge.com", "oldlampshop.com", "sleepykettle.com", "detourvintage.com",
)

ALL_DOMAINS = DISINFO_DOMAINS + NEWS_DOMAINS + KEYWORD_OTHER_DOMAINS + CERT_FEED_DOMAINS + SOCIAL_FEED_DOMAINS


def _disinfo_specs() -> dict[str, dict]:
    return {
        "channel24news.com": {
            "ns": "domaincontrol.com", "asn": 64500,
            "whois": ("GoDaddy.com, LLC", "Domains By Proxy, LLC", "PA",
                      "2025-04-10", "2025-04-10", "2026-04-10"),
            "cert": {"issuer": "Let's Encrypt", "san": 2, "days": 90},
            "http": (200, _wp_body("Newspaper", ("seo", "contact-form-7"))),
        },
        "empirenews.net": {
            "ns": "registrar-servers.com", "asn": 64501,
            "whois": ("NameCheap, Inc.", "WhoisGuard Protected", "PA",
                      "2025-08-02", "2025-08-02", "2026-08-02"),
            "cert": {"san": 1, "days": 365, "self_signed": True},
            "http": (200, _wp_body("Newsmag", ("jetpack", "wordpress-seo"))),
        },
        "viral-liberty-report.xyz": {
            "ns": "orderbox-dns.com", "asn": 64502,
            "whois": ("eNom, LLC", "Privacy Protect, LLC", "US",
                      "2025-11-20", "2025-11-20", "2026-11-20"),
            "cert": {"issuer": "Let's Encrypt", "san": 2, "days": 90},
            "http": (200, _wp_body("mh-magazine", ("seo", "jetpack", "contact-form-7"))),
        },
    }


def _news_specs() -> dict[str, dict]:
    registrars = ("MarkMonitor Inc.", "CSC Corporate Domains, Inc.", "Network Solutions, LLC")
    orgs = synth.NEWS_ORGS
    issuers = ("DigiCert Inc", "Entrust, Inc.", "GlobalSign nv-sa")
    ns_pool = ("akam.net", "ultradns.net", "cscdns.net", "dynect.net")
    as_pool = (64600, 64601, 64602)
    created = ("2004-03-18", "2006-07-02", "2008-11-23", "2010-05-09", "2012-09-14",
               "2001-02-27", "2009-04-11", "2013-08-30", "2005-10-05", "2011-01-21",
               "2007-06-16", "2015-12-03")
    specs = {}
    for i, domain in enumerate(NEWS_DOMAINS):
        wordpress = i in (2, 7)  # a couple of WP-based local outlets
        body = (_wp_body(("largo", "newspack-theme")[i % 2], ("jetpack",))
                if wordpress else _plain_body(domain))
        country = "GB" if domain.endswith(".co.uk") else "US"
        specs[domain] = {
            "ns": ns_pool[i % len(ns_pool)], "asn": as_pool[i % len(as_pool)],
            "whois": (registrars[i % 3], orgs[i % len(orgs)], country,
                      created[i], "2025-06-15", "2028-06-15"),
            "cert": {"issuer": issuers[i % 3], "san": 10 + 3 * i,
                     "days": (365, 398, 730)[i % 3], "wildcard": i % 2 == 0,
                     "subject_org": orgs[i % len(orgs)]},
            "http": (200, body),
        }
    return specs


def _other_specs() -> dict[str, dict]:
    registrars = ("GoDaddy.com, LLC", "Tucows Domains Inc.", "NameCheap, Inc.",
                  "Google LLC", "Gandi SAS")
    ns_pool = ("cloudflare.com", "awsdns-10.org", "googledomains.com",
               "domaincontrol.com", "name-services.com")
    as_pool = (64520, 64521, 64522, 64523, 64524, 64500, 64600)
    issuers = ("Let's Encrypt", "Sectigo Limited", "cPanel, Inc.", "DigiCert Inc")
    created = ("2018-04-02", "2019-09-17", "2020-02-08", "2016-11-29", "2021-07-13",
               "2015-05-24", "2022-03-06", "2017-10-19", "2014-08-01", "2023-01-26")
    domains = KEYWORD_OTHER_DOMAINS + CERT_FEED_DOMAINS + SOCIAL_FEED_DOMAINS
    specs: dict[str, dict] = {}
    for i, domain in enumerate(domains):
        org = synth.OTHER_ORGS[i % len(synth.OTHER_ORGS)] if i % 3 else None
        if i % 7 == 3:
            org = synth.PRIVACY_ORGS[i % len(synth.PRIVACY_ORGS)]
        wordpress = i % 3 == 1
        body = (_wp_body(("astra", "oceanwp")[i % 2], ("elementor",) if i % 2 else ())
                if wordpress else _plain_body(domain))
        spec = {
            "ns": ns_pool[i % len(ns_pool)], "asn": as_pool[i % len(as_pool)],
            "whois": (registrars[i % 5], org, ("US", "DE", "CA", "FR")[i % 4],
                      created[i % len(created)], "2024-11-03",
                      ("2026-09-01", "2027-03-01", "2028-01-01")[i % 3]),
            "cert": {"issuer": issuers[i % 4], "san": 1 + i % 3, "days": (90, 365)[i % 2]},
            "http": (200, body),
        }
        specs[domain] = spec

    # edge cases: these exercise unavailability paths during replay
    specs["ghostharbor.net"] = {"dns": False}  # no fixture data at all
    specs["meadowworks.com"] = {"ns": "cloudflare.com", "asn": 64520}  # DNS only
    specs["brokenbadge.com"]["cert"] = "garbage"
    specs["oldlampshop.com"]["cert"] = {"issuer": "Sectigo Limited", "san": 2,
                                        "days": 365, "end": "2025-11-02"}
    specs["sleepykettle.com"]["http"] = (500, "<html>internal error</html>")
    specs["detourvintage.com"]["redirects"] = 3
    return specs


def _write_feeds(dest: Path):
    base = datetime(2026, 1, 15, 9, 30, tzinfo=timezone.utc)

    def ts(i: int) -> str:
        return (base + timedelta(seconds=40 * i)).strftime("%Y-%m-%dT%H:%M:%SZ")

    reg_lines = []
    reg_domains = DISINFO_DOMAINS + NEWS_DOMAINS + KEYWORD_OTHER_DOMAINS
    for i, domain in enumerate(reg_domains):
        reg_lines.append(json.dumps({"domain": domain, "ts": ts(i)}))
    n = len(reg_domains)
    # registrations without a news keyword: the prefilter drops these
    reg_lines.append(json.dumps({"domain": "quietmeadow.com", "ts": ts(n)}))
    reg_lines.append(json.dumps({"domain": "bluecanoe.net", "ts": ts(n + 1)}))
    # a duplicate inside the dedup window and one corrupt line
    reg_lines.append(json.dumps({"domain": DISINFO_DOMAINS[0], "ts": ts(n + 2)}))
    reg_lines.append('{"domain": "torn-off-line.example"')
    (dest / "feeds" / "registration.jsonl").write_text("\n".join(reg_lines) + "\n")

    cert_lines = [
        json.dumps({"san_list": [domain, f"www.{domain}"], "ts": ts(i)})
        for i, domain in enumerate(CERT_FEED_DOMAINS)
    ]
    (dest / "feeds" / "certificate.jsonl").write_text("\n".join(cert_lines) + "\n")

    social_lines = [
        json.dumps({"text": f"have a look https://{domain}/post/{i} interesting", "ts": ts(i)})
        for i, domain in enumerate(SOCIAL_FEED_DOMAINS)
    ]
    (dest / "feeds" / "social.jsonl").write_text("\n".join(social_lines) + "\n")


def _write_tables(dest: Path):
    asn_rows = []
    geo_rows = []
    for asn, (octet, country, name) in sorted(_AS_BLOCKS.items()):
        network = f"198.18.{octet}.0/24"
        asn_rows.append(f"{network}\t{asn}\t{name}")
        net = ipaddress.ip_network(network)
        geo_rows.append(f"{net.network_address},{net.broadcast_address},{country}")
    (dest / "tables" / "asn.tsv").write_text("\n".join(asn_rows) + "\n")
    (dest / "tables" / "geo.csv").write_text("\n".join(geo_rows) + "\n")


_CONFIG_TEXT = """\
# demo triage workspace
registration_feed = feeds/registration.jsonl
certificate_feed = feeds/certificate.jsonl
social_feed = feeds/social.jsonl
asn_table = tables/asn.tsv
geo_table = tables/geo.csv
archive = store/archive.jsonl
dataset = dataset.csv
queue = store/queue.json
model = model.json
fixture_root = fixtures
bind = 127.0.0.1:8300
workers = 4
dedup_window_hours = 168
freshness_window_hours = 24
"""


def train_demo_model(examples, *, n_trees: int = 64, seed: int = 0):
    """Encoder + forest used by the demo workspace and the end-to-end tests."""
    vectors = [e.features for e in examples]
    labels = [e.label for e in examples]
    encoder = fit_encoder(vectors)
    matrix = encoder.transform_many(vectors)
    params = HyperParams(n_trees=n_trees, max_depth=None, min_samples_split=4,
                         min_leaf=2, features_per_split="sqrt")
    forest = fit_forest(matrix, labels, params, seed=seed)
    forest.encoder = encoder
    return forest


def make_workspace(dest: str | Path, *, per_class: int = 550, seed: int = 0,
                   n_trees: int = 64) -> Path:
    """Write the full demo workspace under `dest` and return it."""
    dest = Path(dest)
    for sub in ("fixtures", "feeds", "tables", "store"):
        (dest / sub).mkdir(parents=True, exist_ok=True)

    ips = _IpPlan()
    specs = {**_disinfo_specs(), **_news_specs(), **_other_specs()}
    for domain in ALL_DOMAINS:
        spec = specs[domain]
        if spec.get("dns", True):
            _write_fixture(dest / "fixtures", domain, spec, ips)

    _write_feeds(dest)
    _write_tables(dest)

    examples = synth.generate(per_class, seed)
    dataset_save(examples, dest / "dataset.csv")
    forest = train_demo_model(examples, n_trees=n_trees, seed=seed)
    model_save(forest, dest / "model.json")
    (dest / "config.conf").write_text(_CONFIG_TEXT)
    return dest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python3 -m disinfotriage.demo",
        description="Write a runnable demo workspace (fixtures, feeds, tables, model).",
    )
    parser.add_argument("--dest", default="demo", help="workspace directory")
    parser.add_argument("--per-class", type=int, default=550)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trees", type=int, default=64)
    args = parser.parse_args(argv)
    path = make_workspace(args.dest, per_class=args.per_class, seed=args.seed,
                          n_trees=args.trees)
    print(f"demo workspace ready at {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

import json
import time
from datetime import date, datetime, timezone
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import certmake
from disinfotriage.probe import (
    ProbeLimits,
    ProbeRecord,
    parse_certificate,
    parse_whois,
    probe_domain,
    record_from_dict,
    record_to_dict,
    record_to_json,
)
from disinfotriage.transport import FIXTURE_CLOCK, FixtureTransport

FULL_WHOIS = """\
Domain Name: CHANNEL24NEWS.COM
Registrar: NameCheap, Inc.
Registrant Organization: WhoisGuard Protected
Registrant Country: PA
Creation Date: 2010-05-01T00:00:00Z
Updated Date: 2024-04-20T08:00:00Z
Registry Expiry Date: 2027-05-01T00:00:00Z
"""


def write_fixture(root: Path, domain: str, dns=None, whois=None, cert=None, http=None):
    d = root / domain
    d.mkdir(parents=True, exist_ok=True)
    if dns is not None:
        (d / "dns.json").write_text(json.dumps(dns))
    if whois is not None:
        (d / "whois.txt").write_text(whois)
    if cert is not None:
        (d / "cert.pem").write_bytes(cert)
    if http is not None:
        (d / "http.json").write_text(json.dumps(http))


@pytest.fixture
def corpus(tmp_path):
    write_fixture(
        tmp_path,
        "channel24news.com",
        dns={
            "addresses": ["203.0.113.10"],
            "nameserver_hosts": ["ns1.cheaphost.example", "ns2.cheaphost.example"],
            "nameserver_addresses": {
                "ns1.cheaphost.example": ["198.51.100.5"],
                "ns2.cheaphost.example": ["198.51.100.6"],
            },
        },
        whois=FULL_WHOIS,
        cert=certmake.make_cert("channel24news.com", san=["channel24news.com", "www.channel24news.com"]),
        http={
            "status": 200,
            "final_url": "https://channel24news.com/",
            "redirect_count": 1,
            "body": "<html><head><meta name=\"generator\" content=\"WordPress 5.2\"></head></html>",
            "headers": [["Content-Type", "text/html"]],
        },
    )
    return tmp_path


class TestFixtureProbe:
    def test_full_fixture_all_sections_available(self, corpus):
        record = probe_domain("channel24news.com", FixtureTransport(corpus))
        assert record.dns.resolves
        assert record.whois.available
        assert record.cert.available and not record.cert.parse_error
        assert record.http.available
        assert record.probed_at == FIXTURE_CLOCK

    def test_missing_domain_dir_total_failure(self, corpus):
        record = probe_domain("never-seen.example", FixtureTransport(corpus))
        assert not record.dns.resolves
        assert not record.whois.available
        assert not record.cert.available
        assert not record.http.available

    def test_https_fails_http_succeeds(self, tmp_path):
        write_fixture(
            tmp_path,
            "plain.example",
            dns={"addresses": ["203.0.113.9"], "nameserver_hosts": [], "nameserver_addresses": {}},
            http={"status": 200, "final_url": "http://plain.example/", "redirect_count": 0,
                  "body": "ok", "headers": []},
        )
        record = probe_domain("plain.example", FixtureTransport(tmp_path))
        assert not record.cert.available
        assert record.http.available

    def test_bit_deterministic_serialization(self, corpus):
        transport = FixtureTransport(corpus)
        first = record_to_json(probe_domain("channel24news.com", transport))
        second = record_to_json(probe_domain("channel24news.com", transport))
        assert first == second

    def test_round_trip(self, corpus):
        record = probe_domain("channel24news.com", FixtureTransport(corpus))
        again = record_from_dict(json.loads(record_to_json(record)))
        assert record_to_dict(again) == record_to_dict(record)

    def test_body_cap_applied(self, tmp_path):
        write_fixture(
            tmp_path,
            "big.example",
            http={"status": 200, "final_url": "http://big.example/", "redirect_count": 0,
                  "body": "x" * 5000, "headers": []},
        )
        limits = ProbeLimits(body_cap=1024)
        record = probe_domain("big.example", FixtureTransport(tmp_path), limits)
        assert len(record.http.body) == 1024

    def test_redirect_cap_marks_unavailable(self, tmp_path):
        write_fixture(
            tmp_path,
            "loop.example",
            http={"status": 200, "final_url": "http://loop.example/", "redirect_count": 11,
                  "body": "", "headers": []},
        )
        record = probe_domain("loop.example", FixtureTransport(tmp_path))
        assert not record.http.available

    def test_nameserver_addresses_limited_to_listed_hosts(self, tmp_path):
        write_fixture(
            tmp_path,
            "ns.example",
            dns={
                "addresses": ["203.0.113.1"],
                "nameserver_hosts": ["ns1.ns.example"],
                "nameserver_addresses": {
                    "ns1.ns.example": ["198.51.100.1"],
                    "stray.other.example": ["198.51.100.2"],
                },
            },
        )
        record = probe_domain("ns.example", FixtureTransport(tmp_path))
        assert list(record.dns.nameserver_addresses) == ["ns1.ns.example"]


class StallTransport:
    """Every sub-probe hangs well past the configured timeout."""

    def now(self):
        return FIXTURE_CLOCK

    def _stall(self):
        time.sleep(30)

    def lookup_dns(self, domain):
        self._stall()

    def fetch_whois(self, domain):
        self._stall()

    def fetch_certificate(self, domain):
        self._stall()

    def fetch_http(self, domain, redirect_cap, body_cap):
        self._stall()


def test_stalling_transport_bounded_by_timeout():
    limits = ProbeLimits(timeout=0.2)
    start = time.monotonic()
    record = probe_domain("slow.example", StallTransport(), limits)
    elapsed = time.monotonic() - start
    assert elapsed < 2.0
    assert not record.dns.resolves
    assert not record.whois.available
    assert not record.cert.available
    assert not record.http.available


class TestWhoisParser:
    def test_iso_creation_date(self):
        obs = parse_whois("Creation Date: 2010-05-01T00:00:00Z\n")
        assert obs.created == date(2010, 5, 1)
        assert obs.available

    def test_full_record(self):
        obs = parse_whois(FULL_WHOIS)
        assert obs.registrar == "NameCheap, Inc."
        assert obs.registrant_org == "WhoisGuard Protected"
        assert obs.registrant_country == "PA"
        assert obs.created == date(2010, 5, 1)
        assert obs.updated == date(2024, 4, 20)
        assert obs.expires == date(2027, 5, 1)

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("created: 2019-03-07\n", date(2019, 3, 7)),
            ("Creation Date: 07-mar-2019\n", date(2019, 3, 7)),
            ("Created On: 2019.03.07\n", date(2019, 3, 7)),
            ("registered: 2019/03/07\n", date(2019, 3, 7)),
            ("Creation Date: 2019-03-07 10:11:12\n", date(2019, 3, 7)),
            ("Creation Date: 2019-03-07T10:11:12+02:00\n", date(2019, 3, 7)),
        ],
    )
    def test_date_format_variants(self, text, expected):
        assert parse_whois(text).created == expected

    def test_first_alias_hit_wins(self):
        text = "Registrar: First LLC\nSponsoring Registrar: Second LLC\n"
        assert parse_whois(text).registrar == "First LLC"

    def test_no_recognized_fields_unavailable(self):
        obs = parse_whois("No match for domain \"NOPE.EXAMPLE\".\n")
        assert not obs.available
        assert obs.registrar is None

    def test_empty_input_unavailable(self):
        assert not parse_whois("").available

    @given(st.text(max_size=400))
    @settings(max_examples=200, deadline=None)
    def test_total_over_arbitrary_text(self, raw):
        obs = parse_whois(raw)
        assert isinstance(obs.available, bool)


class TestCertParser:
    def test_san_pair(self):
        der = certmake.make_cert("example.com", san=["example.com", "www.example.com"], pem=False)
        obs = parse_certificate(der)
        assert obs.san_entries == ["example.com", "www.example.com"]
        assert obs.subject_cn == "example.com"
        assert obs.issuer_name == "Fixture Trust Services"
        assert obs.issuer_country == "US"
        assert not obs.self_signed
        assert not obs.parse_error

    def test_self_issued(self):
        der = certmake.make_cert("empire.example", self_issued=True, pem=False)
        obs = parse_certificate(der)
        assert obs.self_signed

    def test_zero_lifetime(self):
        instant = datetime(2026, 1, 1, tzinfo=timezone.utc)
        der = certmake.make_cert("brief.example", not_before=instant, not_after=instant, pem=False)
        obs = parse_certificate(der)
        assert obs.not_before == obs.not_after == date(2026, 1, 1)

    def test_no_san_extension(self):
        der = certmake.make_cert("bare.example", san=None, pem=False)
        obs = parse_certificate(der)
        assert obs.san_entries == []
        assert not obs.parse_error

    def test_subject_org_captured(self):
        der = certmake.make_cert("corp.example", subject_org="Corp Media House", pem=False)
        assert parse_certificate(der).subject_org == "Corp Media House"

    def test_garbage_bytes_flagged_not_raised(self):
        obs = parse_certificate(b"\x30\x82junk")
        assert obs.parse_error
        assert obs.available

    @given(st.binary(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_total_over_arbitrary_bytes(self, raw):
        obs = parse_certificate(raw)
        assert isinstance(obs.parse_error, bool)

    def test_pem_fixture_decoded_by_transport(self, tmp_path):
        write_fixture(tmp_path, "pem.example", cert=certmake.make_cert("pem.example"))
        record = probe_domain("pem.example", FixtureTransport(tmp_path))
        assert record.cert.available
        assert record.cert.subject_cn == "pem.example"

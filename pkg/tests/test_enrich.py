import ipaddress
import random
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disinfotriage.enrich import (
    AsnTable,
    CmsInfo,
    GeoTable,
    asn_lookup,
    fingerprint_cms,
    geo_lookup,
)


class TestAsnTable:
    @pytest.fixture
    def table(self):
        return AsnTable([
            ("192.0.2.0/24", 64500, "EXAMPLE-NET"),
            ("192.0.2.128/25", 64501, "EXAMPLE-SUB"),
        ])

    def test_longer_prefix_wins(self, table):
        assert asn_lookup("192.0.2.130", table) == (64501, "EXAMPLE-SUB")

    def test_shorter_prefix_when_only_cover(self, table):
        assert asn_lookup("192.0.2.5", table) == (64500, "EXAMPLE-NET")

    def test_uncovered_ip_absent(self, table):
        assert asn_lookup("198.51.100.1", table) is None

    def test_duplicate_prefix_rejected(self):
        with pytest.raises(ValueError):
            AsnTable([("10.0.0.0/8", 1, "A"), ("10.0.0.0/8", 2, "B")])

    def test_load_tsv(self, tmp_path):
        path = tmp_path / "asn_table.tsv"
        path.write_text("# snapshot\n203.0.113.0/24\t64496\tDOC-NET\n")
        table = AsnTable.load(path)
        assert table.lookup("203.0.113.77") == (64496, "DOC-NET")

    def test_load_rejects_malformed_line(self, tmp_path):
        path = tmp_path / "asn_table.tsv"
        path.write_text("203.0.113.0/24 64496 DOC-NET\n")
        with pytest.raises(ValueError):
            AsnTable.load(path)

    def test_matches_brute_force_on_large_random_table(self):
        rng = random.Random(1234)
        networks = {}
        while len(networks) < 10_000:
            length = rng.randint(8, 30)
            value = rng.getrandbits(32) >> (32 - length) << (32 - length)
            network = ipaddress.ip_network((value, length))
            networks.setdefault(network.with_prefixlen, network)
        entries = [
            (key, index, f"AS-{index}")
            for index, key in enumerate(sorted(networks))
        ]
        table = AsnTable(entries)
        nets = [(networks[key], asn, name) for key, asn, name in entries]

        def brute(ip):
            address = ipaddress.ip_address(ip)
            best = None
            for network, asn, name in nets:
                if address in network:
                    if best is None or network.prefixlen > best[0]:
                        best = (network.prefixlen, asn, name)
            return (best[1], best[2]) if best else None

        probes = [str(ipaddress.ip_address(rng.getrandbits(32))) for _ in range(500)]
        # bias half the probes into table prefixes so hits are exercised
        keys = sorted(networks)
        for _ in range(500):
            network = networks[rng.choice(keys)]
            span = int(network.broadcast_address) - int(network.network_address)
            probes.append(str(ipaddress.ip_address(int(network.network_address) + rng.randint(0, span))))
        for ip in probes:
            assert table.lookup(ip) == brute(ip)


class TestGeoTable:
    @pytest.fixture
    def table(self):
        return GeoTable([
            ("203.0.113.0", "203.0.113.255", "US"),
            ("198.51.100.0", "198.51.100.127", "DE"),
        ])

    def test_covered_ip(self, table):
        assert geo_lookup("203.0.113.9", table) == "US"

    def test_uncovered_ip_absent(self, table):
        assert geo_lookup("192.0.2.1", table) is None

    def test_range_start_inclusive(self, table):
        assert geo_lookup("198.51.100.0", table) == "DE"

    def test_range_end_inclusive(self, table):
        assert geo_lookup("198.51.100.127", table) == "DE"
        assert geo_lookup("198.51.100.128", table) is None

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            GeoTable([
                ("10.0.0.0", "10.0.0.255", "US"),
                ("10.0.0.128", "10.0.1.0", "DE"),
            ])

    def test_bad_country_code_rejected(self):
        with pytest.raises(ValueError):
            GeoTable([("10.0.0.0", "10.0.0.255", "USA")])

    def test_inverted_range_rejected(self):
        with pytest.raises(ValueError):
            GeoTable([("10.0.0.255", "10.0.0.0", "US")])

    def test_load_csv(self, tmp_path):
        path = tmp_path / "geo_table.csv"
        path.write_text("# ranges\n203.0.113.0,203.0.113.255,us\n")
        assert GeoTable.load(path).lookup("203.0.113.1") == "US"

    def test_lookup_is_pure(self, table):
        for _ in range(3):
            assert geo_lookup("203.0.113.9", table) == "US"


class TestFingerprintCms:
    def test_plugins_and_theme(self):
        body = (
            '<link href="/wp-content/plugins/contact-form-7/x.css">'
            '<link href="/wp-content/themes/Newspaper/style.css">'
        )
        info = fingerprint_cms(body, [])
        assert info.wordpress
        assert "contact-form-7" in info.plugins
        assert info.theme == "Newspaper"

    def test_empty_body(self):
        info = fingerprint_cms("", [])
        assert info == CmsInfo(wordpress=False, plugins=frozenset(), theme=None)

    def test_generator_tag_only(self):
        body = '<meta name="generator" content="WordPress 5.0">'
        info = fingerprint_cms(body, [])
        assert info.wordpress
        assert info.plugins == frozenset()
        assert info.theme is None

    def test_generator_attribute_order_reversed(self):
        body = '<meta content="WordPress 6.1" name="generator">'
        assert fingerprint_cms(body, []).wordpress

    def test_wp_includes_counts(self):
        assert fingerprint_cms('<script src="/wp-includes/js/x.js"></script>', []).wordpress

    def test_non_wordpress_generator(self):
        assert not fingerprint_cms('<meta name="generator" content="Drupal 9">', []).wordpress

    def test_multiple_themes_lexicographic(self):
        body = (
            '<a href="/wp-content/themes/mh-mag/a.css"></a>'
            '<a href="/wp-content/themes/Newsmag/b.css"></a>'
        )
        # ASCII order puts the capitalized slug first
        assert fingerprint_cms(body, []).theme == "Newsmag"

    def test_plugin_slugs_distinct(self):
        body = (
            '/wp-content/plugins/seo/a.js /wp-content/plugins/jetpack/b.js '
            '/wp-content/plugins/seo/c.js'
        )
        assert fingerprint_cms(body, []).plugins == frozenset({"seo", "jetpack"})

    @given(st.text(alphabet=" \t\n<>/-=\"abcdefgwp.conteim", max_size=300))
    @settings(max_examples=150, deadline=None)
    def test_no_wordpress_implies_empty_evidence(self, body):
        info = fingerprint_cms(body, [])
        if not info.wordpress:
            assert info.plugins == frozenset()
            assert info.theme is None

    def test_invariant_under_whitespace_normalization(self):
        body = (
            '<meta   name = "generator"\n  content="WordPress 5.2" >\n'
            '<link\thref="/wp-content/plugins/jetpack/x.css">\n'
            '<link href="/wp-content/themes/mh-mag/style.css">'
        )
        normalized = re.sub(r"\s+", " ", body)
        assert fingerprint_cms(body, []) == fingerprint_cms(normalized, [])

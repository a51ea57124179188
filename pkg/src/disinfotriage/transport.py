"""Transports backing probe_domain: directory fixtures and the live network.

Both expose the same five methods (now, lookup_dns, fetch_whois,
fetch_certificate, fetch_http) so the prober is transport-agnostic. Fixture
replay is the only mode exercised by the test suite; live mode exists for
operation and follows the same observation shapes.
"""

from __future__ import annotations

import json
import socket
import ssl
import struct
import urllib.parse
import urllib.request
from datetime import datetime, timezone
from pathlib import Path

FIXTURE_CLOCK = datetime(2026, 1, 15, 12, 0, 0, tzinfo=timezone.utc)


class FixtureTransport:
    """Replay per-domain fixture directories.

    Layout: ``<root>/<domain>/`` holding ``dns.json``, ``whois.txt``,
    ``cert.pem``, ``http.json``. A missing file or directory reads as that
    sub-probe failing. The clock is fixed so repeated probes are
    bit-identical. Instances are stateless and safe for concurrent reads.
    """

    def __init__(self, root: str | Path, clock: datetime = FIXTURE_CLOCK):
        self.root = Path(root)
        self._clock = clock

    def now(self) -> datetime:
        return self._clock

    def _path(self, domain: str, name: str) -> Path:
        return self.root / domain / name

    def lookup_dns(self, domain: str) -> dict:
        return json.loads(self._path(domain, "dns.json").read_text())

    def fetch_whois(self, domain: str) -> str:
        return self._path(domain, "whois.txt").read_text()

    def fetch_certificate(self, domain: str) -> bytes:
        raw = self._path(domain, "cert.pem").read_bytes()
        if b"-----BEGIN CERTIFICATE-----" in raw:
            from cryptography import x509
            from cryptography.hazmat.primitives.serialization import Encoding

            return x509.load_pem_x509_certificate(raw).public_bytes(Encoding.DER)
        return raw

    def fetch_http(self, domain: str, redirect_cap: int, body_cap: int) -> dict:
        return json.loads(self._path(domain, "http.json").read_text())


# --- minimal DNS wire client ---------------------------------------------

_TYPE_A = 1
_TYPE_NS = 2


def _encode_qname(name: str) -> bytes:
    out = b""
    for label in name.rstrip(".").split("."):
        raw = label.encode("idna") if not label.isascii() else label.encode()
        out += bytes([len(raw)]) + raw
    return out + b"\x00"


def _decode_name(message: bytes, offset: int) -> tuple[str, int]:
    labels = []
    jumped = False
    end = offset
    for _ in range(128):  # pointer-loop guard
        length = message[offset]
        if length == 0:
            if not jumped:
                end = offset + 1
            break
        if length & 0xC0 == 0xC0:
            if not jumped:
                end = offset + 2
                jumped = True
            offset = ((length & 0x3F) << 8) | message[offset + 1]
            continue
        labels.append(message[offset + 1 : offset + 1 + length].decode("ascii", "replace"))
        offset += 1 + length
    return ".".join(labels), end


def _dns_query(resolver: str, name: str, qtype: int, timeout: float) -> list[tuple[str, int, bytes, bytes]]:
    """Send one query; return (owner, type, rdata, message) per answer record."""
    header = struct.pack(">HHHHHH", 0x1234, 0x0100, 1, 0, 0, 0)
    question = _encode_qname(name) + struct.pack(">HH", qtype, 1)
    query = header + question

    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        sock.settimeout(timeout)
        sock.sendto(query, (resolver, 53))
        message, _ = sock.recvfrom(4096)

    (_, flags, qd, an, ns, ar) = struct.unpack(">HHHHHH", message[:12])
    offset = 12
    for _ in range(qd):
        _, offset = _decode_name(message, offset)
        offset += 4
    records = []
    for _ in range(an + ns + ar):
        owner, offset = _decode_name(message, offset)
        rtype, _, _, rdlen = struct.unpack(">HHIH", message[offset : offset + 10])
        offset += 10
        rdata = message[offset : offset + rdlen]
        records.append((owner.lower(), rtype, rdata, message[: offset + rdlen]))
        offset += rdlen
    return records


class LiveTransport:
    """Probe the real network.

    DNS goes to one configured resolver (no recursion of our own); WHOIS is a
    single TCP-43 exchange with referral following disabled; the TLS probe
    records the leaf certificate without validating the chain, since invalid
    certificates are evidence rather than errors.
    """

    def __init__(self, resolver: str = "8.8.8.8", timeout: float = 10.0,
                 whois_server: str | None = None):
        self.resolver = resolver
        self.timeout = timeout
        self.whois_server = whois_server

    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def lookup_dns(self, domain: str) -> dict:
        addresses = []
        for owner, rtype, rdata, _ in _dns_query(self.resolver, domain, _TYPE_A, self.timeout):
            if rtype == _TYPE_A and len(rdata) == 4:
                addresses.append(socket.inet_ntoa(rdata))

        hosts = []
        for owner, rtype, rdata, message in _dns_query(self.resolver, domain, _TYPE_NS, self.timeout):
            if rtype == _TYPE_NS:
                target, _ = _decode_name(message, len(message) - len(rdata))
                if target:
                    hosts.append(target.lower())

        ns_addresses: dict[str, list[str]] = {}
        for host in hosts:
            addrs = []
            try:
                for _, rtype, rdata, _ in _dns_query(self.resolver, host, _TYPE_A, self.timeout):
                    if rtype == _TYPE_A and len(rdata) == 4:
                        addrs.append(socket.inet_ntoa(rdata))
            except OSError:
                pass
            if addrs:
                ns_addresses[host] = sorted(addrs)

        return {
            "addresses": sorted(addresses),
            "nameserver_hosts": sorted(hosts),
            "nameserver_addresses": ns_addresses,
        }

    def fetch_whois(self, domain: str) -> str:
        server = self.whois_server or domain.rsplit(".", 1)[-1] + ".whois-servers.net"
        with socket.create_connection((server, 43), timeout=self.timeout) as sock:
            sock.settimeout(self.timeout)
            sock.sendall(domain.encode("ascii") + b"\r\n")
            chunks = []
            while True:
                chunk = sock.recv(4096)
                if not chunk:
                    break
                chunks.append(chunk)
        return b"".join(chunks).decode("utf-8", "replace")

    def fetch_certificate(self, domain: str) -> bytes:
        context = ssl.SSLContext(ssl.PROTOCOL_TLS_CLIENT)
        context.check_hostname = False
        context.verify_mode = ssl.CERT_NONE
        with socket.create_connection((domain, 443), timeout=self.timeout) as raw:
            with context.wrap_socket(raw, server_hostname=domain) as tls:
                der = tls.getpeercert(binary_form=True)
        if der is None:
            raise ConnectionError("peer sent no certificate")
        return der

    def fetch_http(self, domain: str, redirect_cap: int, body_cap: int) -> dict:
        url = f"https://{domain}/"
        redirect_count = 0
        status = None
        headers: list[list[str]] = []
        body = None
        for scheme in ("https", "http"):
            url = f"{scheme}://{domain}/"
            try:
                while True:
                    request = urllib.request.Request(url, headers={"User-Agent": "infra-probe/1"})
                    opener = urllib.request.build_opener(_NoRedirect())
                    with opener.open(request, timeout=self.timeout) as response:
                        status = response.status
                        headers = [[k, v] for k, v in response.getheaders()]
                        if status in (301, 302, 303, 307, 308):
                            location = response.headers.get("Location")
                            if not location or redirect_count >= redirect_cap:
                                break
                            url = urllib.parse.urljoin(url, location)
                            redirect_count += 1
                            continue
                        body = response.read(body_cap).decode("utf-8", "replace")
                        break
                break
            except OSError:
                if scheme == "http":
                    raise
        return {
            "status": status,
            "final_url": url,
            "redirect_count": redirect_count,
            "body": body,
            "headers": headers,
        }


class _NoRedirect(urllib.request.HTTPRedirectHandler):
    def redirect_request(self, req, fp, code, msg, headers, newurl):
        return None

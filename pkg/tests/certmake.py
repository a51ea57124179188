"""Build throwaway X.509 certificates for fixtures."""

from __future__ import annotations

import datetime

from cryptography import x509
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.x509.oid import NameOID

_KEY = ec.generate_private_key(ec.SECP256R1())
_ISSUER_KEY = ec.generate_private_key(ec.SECP256R1())


def _name(cn: str, org: str | None = None, country: str | None = None) -> x509.Name:
    attrs = [x509.NameAttribute(NameOID.COMMON_NAME, cn)]
    if org:
        attrs.append(x509.NameAttribute(NameOID.ORGANIZATION_NAME, org))
    if country:
        attrs.append(x509.NameAttribute(NameOID.COUNTRY_NAME, country))
    return x509.Name(attrs)


def make_cert(
    subject_cn: str,
    san: list[str] | None = None,
    issuer_cn: str = "Fixture Issuing CA",
    issuer_org: str | None = "Fixture Trust Services",
    issuer_country: str | None = "US",
    subject_org: str | None = None,
    self_issued: bool = False,
    not_before: datetime.datetime | None = None,
    not_after: datetime.datetime | None = None,
    pem: bool = True,
) -> bytes:
    if not_before is None:
        not_before = datetime.datetime(2025, 11, 1, tzinfo=datetime.timezone.utc)
    if not_after is None:
        not_after = not_before + datetime.timedelta(days=90)

    subject = _name(subject_cn, org=subject_org)
    if self_issued:
        issuer = subject
        signing_key = _KEY
    else:
        issuer = _name(issuer_cn, org=issuer_org, country=issuer_country)
        signing_key = _ISSUER_KEY

    builder = (
        x509.CertificateBuilder()
        .subject_name(subject)
        .issuer_name(issuer)
        .public_key(_KEY.public_key())
        .serial_number(x509.random_serial_number())
        .not_valid_before(not_before)
        .not_valid_after(not_after)
    )
    if san is not None:
        builder = builder.add_extension(
            x509.SubjectAlternativeName([x509.DNSName(n) for n in san]), critical=False
        )
    cert = builder.sign(signing_key, hashes.SHA256())

    from cryptography.hazmat.primitives.serialization import Encoding

    return cert.public_bytes(Encoding.PEM if pem else Encoding.DER)

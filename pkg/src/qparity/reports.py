"""Canonical, byte-stable report payloads for the command-line tools.

Numbers are rendered once, deterministically: rationals as "p/q" strings,
floats with 12 significant digits (round-half-even), so serialized reports
are identical across runs and safe to diff or hash.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

SCHEMA_VERSION = 1


def fmt_float(x: float) -> str:
    value = float(x)
    if value == 0.0:
        value = 0.0  # collapse negative zero
    return format(value, ".12g")


def fmt_fraction(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def with_checksum(payload: dict) -> dict:
    """Attach a SHA-256 over the canonical serialization of the payload."""
    body = dict(payload)
    body.pop("checksum", None)
    digest = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    out = dict(body)
    out["checksum"] = digest
    return out


def verify_checksum(payload: dict) -> bool:
    if "checksum" not in payload:
        return False
    return with_checksum(payload)["checksum"] == payload["checksum"]

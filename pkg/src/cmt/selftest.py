"""Known-answer and sanity self-test suite, exposed via `cmt selftest`.

Needs no store and no master key. Covers the published AES-128 vectors,
S-box structure, codec round trips, and a loose throughput bound on bulk
block encryption.
"""

import os
import time

from . import aes_core
from .crypto_codec import decrypt_value, encrypt_value
from .errors import AuthError
from .key_service import TenantKeySet

# published AES-128 known-answer vectors
KAT_CIPHER_KEY = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
KAT_CIPHER_PT = bytes.fromhex("3243f6a8885a308d313198a2e0370734")
KAT_CIPHER_CT = bytes.fromhex("3925841d02dc09fbdc118597196a0b32")

KAT_VECTORS_KEY = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
KAT_VECTORS_PT = bytes.fromhex("00112233445566778899aabbccddeeff")
KAT_VECTORS_CT = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")

# w[4] of the key expansion for KAT_CIPHER_KEY
KAT_EXPANSION_W4 = bytes.fromhex("a0fafe17")

THROUGHPUT_BUFFER_BYTES = 16 * 1024 * 1024
THROUGHPUT_FLOOR_MBPS = 1.0


def _check_sbox() -> bool:
    if sorted(aes_core.SBOX) != list(range(256)):
        return False
    if any(aes_core.INV_SBOX[aes_core.SBOX[i]] != i for i in range(256)):
        return False
    return aes_core.SBOX[0x00] == 0x63 and aes_core.SBOX[0x53] == 0xED


def _check_kat(key: bytes, pt: bytes, ct: bytes) -> bool:
    ks = aes_core.expand_key(key)
    return aes_core.encrypt_block(pt, ks) == ct and aes_core.decrypt_block(ct, ks) == pt


def _check_key_expansion() -> bool:
    ks = aes_core.expand_key(KAT_CIPHER_KEY)
    if ks.round_keys[0] != KAT_CIPHER_KEY:
        return False
    return ks.round_keys[1][:4] == KAT_EXPANSION_W4


def _check_codec_round_trip() -> bool:
    keys = TenantKeySet(enc_key=os.urandom(16), mac_key=os.urandom(16))
    for n in (0, 1, 15, 16, 17, 100, 1024):
        p = os.urandom(n)
        if decrypt_value(encrypt_value(p, keys), keys) != p:
            return False
    wrong = TenantKeySet(enc_key=os.urandom(16), mac_key=os.urandom(16))
    try:
        decrypt_value(encrypt_value(b"secret", keys), wrong)
    except AuthError:
        return True
    return False


def _check_throughput(report) -> bool:
    ks = aes_core.expand_key(os.urandom(16))
    # bulk path must agree with the scalar cipher before we trust its speed
    sample = os.urandom(16 * 32)
    scalar = b"".join(
        aes_core.encrypt_block(sample[i : i + 16], ks) for i in range(0, len(sample), 16)
    )
    if aes_core.encrypt_ecb(sample, ks) != scalar:
        return False
    buf = os.urandom(THROUGHPUT_BUFFER_BYTES)
    start = time.perf_counter()
    aes_core.encrypt_ecb(buf, ks)
    elapsed = time.perf_counter() - start
    mbps = THROUGHPUT_BUFFER_BYTES / (1024 * 1024) / elapsed
    report(f"  throughput: {mbps:.1f} MB/s over {THROUGHPUT_BUFFER_BYTES // (1024 * 1024)} MB")
    return mbps >= THROUGHPUT_FLOOR_MBPS


def run_selftest(report=print) -> bool:
    """Run every check, print one pass/fail line each, return overall result."""
    checks = [
        ("sbox-permutation", _check_sbox),
        ("kat-cipher-example", lambda: _check_kat(KAT_CIPHER_KEY, KAT_CIPHER_PT, KAT_CIPHER_CT)),
        ("kat-example-vectors", lambda: _check_kat(KAT_VECTORS_KEY, KAT_VECTORS_PT, KAT_VECTORS_CT)),
        ("key-expansion-w4", _check_key_expansion),
        ("codec-round-trip", _check_codec_round_trip),
        ("block-throughput", lambda: _check_throughput(report)),
    ]
    ok = True
    for name, check in checks:
        try:
            passed = check()
        except Exception as exc:  # a crashing check is a failing check
            report(f"  {name} raised: {exc}")
            passed = False
        report(f"{'pass' if passed else 'FAIL'} {name}")
        ok = ok and passed
    return ok

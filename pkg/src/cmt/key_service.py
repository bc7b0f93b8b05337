"""Master key loading and AES-only per-tenant key derivation.

The tenant root is the CBC-MAC (zero IV, PKCS#7-padded tenant id bytes)
of the tenant id under the master key. The two subkeys are AES
encryptions of distinct constant blocks under that root, so they can
never collide with each other.
"""

import os
import re
from dataclasses import dataclass

from . import aes_core
from .crypto_codec import cbc_mac, pad
from .errors import InvalidTenantId, MalformedKey, MissingKey

MASTER_KEY_ENV = "CMT_MASTER_KEY"

_TENANT_ID_RE = re.compile(r"^[a-z0-9_-]{1,64}$")

_ENC_CONST = bytes([0x01]) * 16
_MAC_CONST = bytes([0x02]) * 16


@dataclass(frozen=True)
class MasterKey:
    key: bytes

    def __post_init__(self):
        if len(self.key) != aes_core.KEY_SIZE:
            raise MalformedKey("master key must be exactly 16 bytes")


@dataclass(frozen=True)
class TenantKeySet:
    enc_key: bytes
    mac_key: bytes


def validate_tenant_id(tenant_id: str) -> str:
    if not isinstance(tenant_id, str) or not _TENANT_ID_RE.match(tenant_id):
        raise InvalidTenantId(
            f"tenant id must match [a-z0-9_-]{{1,64}}, got {tenant_id!r}"
        )
    return tenant_id


def _parse_hex_key(text: str) -> MasterKey:
    text = text.strip()
    if not re.fullmatch(r"[0-9a-fA-F]{32}", text):
        raise MalformedKey("master key must be 32 hex characters")
    return MasterKey(bytes.fromhex(text))


def load_master_key(key_file: str = None, env_var: str = MASTER_KEY_ENV) -> MasterKey:
    """Load the master key from a file (takes precedence) or the environment."""
    if key_file is not None:
        try:
            with open(key_file, "r", encoding="utf-8") as fh:
                return _parse_hex_key(fh.read())
        except FileNotFoundError:
            raise MissingKey(f"master key file not found: {key_file}") from None
    value = os.environ.get(env_var)
    if value is None:
        raise MissingKey(
            f"set {env_var} (32 hex chars) or pass --master-key-file"
        )
    return _parse_hex_key(value)


def derive_tenant_keys(master: MasterKey, tenant_id: str) -> TenantKeySet:
    """Deterministically derive the per-tenant encryption and MAC keys."""
    validate_tenant_id(tenant_id)
    master_schedule = aes_core.expand_key(master.key)
    root = cbc_mac(pad(tenant_id.encode("utf-8")), master_schedule)
    root_schedule = aes_core.expand_key(root)
    return TenantKeySet(
        enc_key=aes_core.encrypt_block(_ENC_CONST, root_schedule),
        mac_key=aes_core.encrypt_block(_MAC_CONST, root_schedule),
    )

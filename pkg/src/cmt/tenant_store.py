"""Shared-table multi-tenant record store, "separate rows" style.

One logical table holds every tenant's rows. Tenant id and row id stay in
clear for addressing; every field value is encrypted under the owning
tenant's derived keys before it touches disk. Persistence is an
append-only JSON-lines log replayed in full on open; each mutation is
flushed and fsynced before the call returns. A trailing torn line (crash
mid-write) is truncated on open with a warning.

File format (UTF-8, newline-delimited):
  line 1: {"v":1,"table":"<name>","fields":["f1",...]}
  then one event per line:
    {"op":"ins"|"upd"|"del","t":"<tenant>","r":<row_id>,"ts":<unix s>,
     "f":{"<field>":"<base64 IV||ct||tag>",...}}   ("f" omitted for del)
"""

import base64
import fcntl
import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .crypto_codec import CipherValue, decrypt_value, encrypt_value
from .errors import (
    AlreadyExists,
    CorruptHeader,
    CorruptLog,
    InvalidSchema,
    IsolationDenied,
    NotFound,
    SchemaMismatch,
    MissingKey,
    StoreLocked,
    VersionMismatch,
)
from .key_service import MasterKey, TenantKeySet, derive_tenant_keys, validate_tenant_id

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

_NAME_RE = re.compile(r"^[a-z0-9_]{1,64}$")


@dataclass(frozen=True)
class TableSchema:
    table_name: str
    field_names: Tuple[str, ...]

    def __post_init__(self):
        if not _NAME_RE.match(self.table_name):
            raise InvalidSchema(f"bad table name: {self.table_name!r}")
        if not 1 <= len(self.field_names) <= 32:
            raise InvalidSchema("schema must have 1..32 fields")
        for name in self.field_names:
            if not _NAME_RE.match(name):
                raise InvalidSchema(f"bad field name: {name!r}")
        if len(set(self.field_names)) != len(self.field_names):
            raise InvalidSchema("duplicate field names")


@dataclass(frozen=True)
class Record:
    """A decrypted row as returned to an authorized caller."""

    row_id: int
    tenant: str
    fields: Dict[str, str]


class Store:
    """Handle over one store file. Single writer per process; mutations
    serialize through an internal lock. One process per file, enforced by
    an advisory flock on <path>.lock."""

    def __init__(self, path: str, schema: TableSchema, master: Optional[MasterKey]):
        self.path = path
        self.schema = schema
        self._master = master
        self._live: Dict[int, Tuple[str, Dict[str, CipherValue]]] = {}
        self._max_row_id = 0
        self._mutex = threading.Lock()
        self._key_cache: Dict[str, TenantKeySet] = {}
        self._lock_fh = open(path + ".lock", "a")
        try:
            fcntl.flock(self._lock_fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            self._lock_fh.close()
            raise StoreLocked(f"store is locked by another process: {path}") from None
        self._fh = open(path, "a", encoding="utf-8")

    # -- lifecycle -----------------------------------------------------

    def close(self) -> None:
        self._fh.close()
        fcntl.flock(self._lock_fh, fcntl.LOCK_UN)
        self._lock_fh.close()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- internals -----------------------------------------------------

    def _keys_for(self, tenant: str) -> TenantKeySet:
        if self._master is None:
            raise MissingKey("store was opened without a master key")
        if tenant not in self._key_cache:
            self._key_cache[tenant] = derive_tenant_keys(self._master, tenant)
        return self._key_cache[tenant]

    def _append_event(self, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":"))
        self._fh.write(line + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def _apply(self, event: dict) -> None:
        op, tenant, row_id = event["op"], event["t"], event["r"]
        if op in ("ins", "upd"):
            fields = {
                name: CipherValue.from_bytes(base64.b64decode(b64))
                for name, b64 in event["f"].items()
            }
            self._live[row_id] = (tenant, fields)
        elif op == "del":
            self._live.pop(row_id, None)
        else:
            raise CorruptLog(f"unknown op {op!r}")
        self._max_row_id = max(self._max_row_id, row_id)

    def _live_row(self, tenant: str, row_id: int) -> Dict[str, CipherValue]:
        validate_tenant_id(tenant)
        if row_id not in self._live:
            raise NotFound(f"no live row {row_id}")
        owner, fields = self._live[row_id]
        # ownership is checked on the clear tenant column, never by decrypting
        if owner != tenant:
            raise IsolationDenied(f"row {row_id} belongs to another tenant")
        return fields

    def _encrypt_fields(self, tenant: str, values: Dict[str, str]) -> Dict[str, str]:
        if set(values) != set(self.schema.field_names):
            missing = set(self.schema.field_names) - set(values)
            extra = set(values) - set(self.schema.field_names)
            raise SchemaMismatch(f"missing={sorted(missing)} extra={sorted(extra)}")
        keys = self._keys_for(tenant)
        return {
            name: base64.b64encode(
                encrypt_value(values[name].encode("utf-8"), keys).to_bytes()
            ).decode("ascii")
            for name in self.schema.field_names
        }

    # -- operations ----------------------------------------------------

    def insert(self, tenant: str, values: Dict[str, str]) -> int:
        validate_tenant_id(tenant)
        with self._mutex:
            encrypted = self._encrypt_fields(tenant, values)
            row_id = self._max_row_id + 1
            event = {
                "op": "ins",
                "t": tenant,
                "r": row_id,
                "ts": int(time.time()),
                "f": encrypted,
            }
            self._append_event(event)
            self._apply(event)
        return row_id

    def get(self, tenant: str, row_id: int) -> Record:
        fields = self._live_row(tenant, row_id)
        keys = self._keys_for(tenant)
        plain = {
            name: decrypt_value(cv, keys).decode("utf-8")
            for name, cv in fields.items()
        }
        return Record(row_id=row_id, tenant=tenant, fields=plain)

    def list(self, tenant: str) -> List[Record]:
        validate_tenant_id(tenant)
        out = []
        for row_id in sorted(self._live):
            owner, _ = self._live[row_id]
            if owner == tenant:
                out.append(self.get(tenant, row_id))
        return out

    def update(self, tenant: str, row_id: int, values: Dict[str, str]) -> None:
        with self._mutex:
            self._live_row(tenant, row_id)
            event = {
                "op": "upd",
                "t": tenant,
                "r": row_id,
                "ts": int(time.time()),
                "f": self._encrypt_fields(tenant, values),
            }
            self._append_event(event)
            self._apply(event)

    def delete(self, tenant: str, row_id: int) -> None:
        with self._mutex:
            self._live_row(tenant, row_id)
            event = {"op": "del", "t": tenant, "r": row_id, "ts": int(time.time())}
            self._append_event(event)
            self._apply(event)


def create_store(path: str, schema: TableSchema, master: Optional[MasterKey] = None) -> Store:
    if os.path.exists(path):
        raise AlreadyExists(f"store file already exists: {path}")
    header = {
        "v": FORMAT_VERSION,
        "table": schema.table_name,
        "fields": list(schema.field_names),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    return Store(path, schema, master)


def open_store(path: str, master: Optional[MasterKey] = None) -> Store:
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.split(b"\n")
    if not lines or not lines[0]:
        raise CorruptHeader(f"empty store file: {path}")
    try:
        header = json.loads(lines[0].decode("utf-8"))
        version = header["v"]
        schema = TableSchema(header["table"], tuple(header["fields"]))
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptHeader(f"unparseable header in {path}: {exc}") from None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported store version {version}")

    # a trailing chunk without its newline is a torn write: drop it
    complete, torn = lines[1:-1], lines[-1]
    events = []
    for i, line in enumerate(complete):
        try:
            events.append(json.loads(line.decode("utf-8")))
        except ValueError:
            raise CorruptLog(f"corrupt event at line {i + 2} of {path}") from None
    if torn:
        logger.warning("truncating torn trailing write in %s (%d bytes)", path, len(torn))
        keep = len(raw) - len(torn)
        with open(path, "r+b") as fh:
            fh.truncate(keep)

    store = Store(path, schema, master)
    for event in events:
        store._apply(event)
    return store

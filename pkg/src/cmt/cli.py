"""Command-line front end: `cmt init|insert|get|list|update|delete|selftest`.

Exit codes are a stable contract:
  0 ok, 1 selftest failure, 2 usage/schema error, 3 key/store access error,
  4 row not found, 5 isolation denied, 6 authentication failure.

Decrypted data goes to stdout only; all diagnostics go to stderr.
"""

import argparse
import sys

from . import tenant_store
from .errors import (
    AlreadyExists,
    AuthError,
    CmtError,
    FieldTooLarge,
    InvalidSchema,
    InvalidTenantId,
    IsolationDenied,
    NotFound,
    SchemaMismatch,
)
from .key_service import load_master_key
from .selftest import run_selftest
from .tenant_store import TableSchema, create_store, open_store

DEFAULT_STORE = "./studententry.cmt"

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_ACCESS = 3
EXIT_NOT_FOUND = 4
EXIT_ISOLATION = 5
EXIT_AUTH = 6


def _exit_code(err: CmtError) -> int:
    if isinstance(err, NotFound):
        return EXIT_NOT_FOUND
    if isinstance(err, IsolationDenied):
        return EXIT_ISOLATION
    if isinstance(err, AuthError):
        return EXIT_AUTH
    if isinstance(
        err, (SchemaMismatch, InvalidSchema, AlreadyExists, InvalidTenantId, FieldTooLarge)
    ):
        return EXIT_USAGE
    return EXIT_ACCESS


def _parse_sets(pairs) -> dict:
    values = {}
    for pair in pairs or []:
        field, sep, value = pair.partition("=")
        if not sep or not field:
            raise InvalidSchema(f"--set expects field=value, got {pair!r}")
        values[field] = value
    return values


def _print_record(record: tenant_store.Record, schema: TableSchema) -> None:
    print(f"row={record.row_id}")
    for name in schema.field_names:
        print(f"{name}={record.fields[name]}")


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise InvalidSchema(f"--{name} is required for this command")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmt", description="Encrypted multi-tenant record store."
    )
    parser.add_argument("--store", default=DEFAULT_STORE, help="store file path")
    parser.add_argument("--master-key-file", help="file holding the 32-hex-char master key")
    parser.add_argument("--tenant", help="tenant id for data commands")
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create a new store")
    p_init.add_argument("--table", required=True)
    p_init.add_argument("--fields", required=True, help="comma-separated field names")

    p_insert = sub.add_parser("insert", help="insert a row for a tenant")
    p_insert.add_argument("--set", action="append", metavar="FIELD=VALUE")

    p_get = sub.add_parser("get", help="fetch and decrypt one row")
    p_get.add_argument("--row", type=int)

    sub.add_parser("list", help="list all of a tenant's rows")

    p_update = sub.add_parser("update", help="replace all fields of a row")
    p_update.add_argument("--row", type=int)
    p_update.add_argument("--set", action="append", metavar="FIELD=VALUE")

    p_delete = sub.add_parser("delete", help="delete a row")
    p_delete.add_argument("--row", type=int)

    sub.add_parser("selftest", help="run cipher and codec known-answer checks")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse already printed to stderr; only --help exits 0
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        if args.command == "selftest":
            return EXIT_OK if run_selftest() else EXIT_SELFTEST

        if args.command == "init":
            fields = tuple(f for f in args.fields.split(",") if f)
            store = create_store(args.store, TableSchema(args.table, fields))
            store.close()
            print(
                f"created store {args.store}: table {args.table} "
                f"({', '.join(fields)})",
                file=sys.stderr,
            )
            return EXIT_OK

        # data commands need a key and a tenant
        _require(args, "tenant")
        master = load_master_key(key_file=args.master_key_file)
        with open_store(args.store, master) as store:
            if args.command == "insert":
                row_id = store.insert(args.tenant, _parse_sets(args.set))
                print(row_id)
            elif args.command == "get":
                _require(args, "row")
                _print_record(store.get(args.tenant, args.row), store.schema)
            elif args.command == "list":
                for record in store.list(args.tenant):
                    _print_record(record, store.schema)
            elif args.command == "update":
                _require(args, "row")
                store.update(args.tenant, args.row, _parse_sets(args.set))
            elif args.command == "delete":
                _require(args, "row")
                store.delete(args.tenant, args.row)
        return EXIT_OK

    except CmtError as err:
        print(f"cmt: error: {err}", file=sys.stderr)
        return _exit_code(err)
    except OSError as err:
        print(f"cmt: i/o error: {err}", file=sys.stderr)
        return EXIT_ACCESS


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

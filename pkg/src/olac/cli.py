"""Command line front end tying the toolkit together.

Subcommands:

    validate PATH...            check record files, print diagnostics
    provider serve DIRECTORY    answer the harvesting protocol over HTTP
    harvest URL... | --all      pull provider contents into the catalog
    query CLAUSE...             search the catalog; --join pairs two queries
    catalog serve               expose the catalog JSON API and web bundle
    vocab list [VOCABULARY]     list vocabulary ids, or one vocabulary's terms

Exit status is 0 on success, 1 when the domain said no (validation
errors, failed harvests, unknown codes) and 2 when the environment did
(unreadable files, bad configuration, busy ports, usage mistakes).
Results go to stdout and everything else to stderr, so output can feed
a pipeline.

Settings come from flags, falling back to a key=value config file
(``--config`` or ``$OLAC_CONFIG``), falling back to built-in defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from olac.catalog import Catalog, CatalogError, CatalogStoreError, Query, \
    clause_from_text
from olac.catalog_http import CatalogServer, entry_summary, join_payload
from olac.harvester import BadIdentify, DuplicateArchive, Harvester, \
    NoProviders, Unreachable
from olac.model import UnknownElement, validate_record
from olac.provider_http import ProviderServer
from olac.repository import RepositoryError, load_repository
from olac.vocab import Registry, UnknownVocabulary, VocabularyError, \
    default_registry, load_registry
from olac.xmlio import parse_record

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_ENV = 2

log = logging.getLogger(__name__)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    catalog_dir: Path = Path("olac-catalog")
    vocab_dir: Optional[Path] = None
    listen_address: str = "127.0.0.1:8340"
    page_size: int = 100
    parallelism: int = 4
    retries: int = 3


_PATH_KEYS = ("catalog_dir", "vocab_dir")
_INT_KEYS = ("page_size", "parallelism", "retries")
_CONFIG_KEYS = _PATH_KEYS + _INT_KEYS + ("listen_address",)


def _positive(name: str, value: int) -> int:
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {value}")
    return value


def load_config_file(path: Path) -> dict:
    """Parse a key=value settings file. Blank lines and # comments are
    skipped; unknown keys are rejected rather than ignored."""
    values: dict = {}
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
        if key in _INT_KEYS:
            try:
                values[key] = _positive(key, int(value))
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: {key} wants an integer, got {value!r}"
                ) from None
        elif key in _PATH_KEYS:
            values[key] = Path(value)
        else:
            values[key] = value
    return values


def resolve_config(args: argparse.Namespace) -> CliConfig:
    """Defaults, then the config file, then command line flags."""
    config = CliConfig()
    path_text = args.config or os.environ.get("OLAC_CONFIG")
    if path_text:
        config = dataclasses.replace(config,
                                     **load_config_file(Path(path_text)))
    if args.catalog_dir:
        config = dataclasses.replace(config,
                                     catalog_dir=Path(args.catalog_dir))
    if args.vocab_dir:
        config = dataclasses.replace(config, vocab_dir=Path(args.vocab_dir))
    return config


def _pick_int(name: str, flag_value: Optional[int],
              config_value: int) -> int:
    if flag_value is None:
        return config_value
    return _positive(name, flag_value)


def split_listen(address: str) -> tuple[str, int]:
    host, sep, port_text = address.rpartition(":")
    if not sep or not host:
        raise ConfigError(
            f"listen address must look like host:port, got {address!r}")
    try:
        return host, int(port_text)
    except ValueError:
        raise ConfigError(
            f"listen address has a non-numeric port: {address!r}") from None


def _load_registry(config: CliConfig) -> Registry:
    if config.vocab_dir is None:
        return default_registry()
    try:
        return load_registry(config.vocab_dir)
    except (OSError, VocabularyError) as exc:
        raise ConfigError(f"cannot load vocabularies: {exc}") from exc


def _open_catalog(config: CliConfig, registry: Registry) -> Catalog:
    try:
        return Catalog(config.catalog_dir, registry=registry)
    except (OSError, CatalogStoreError) as exc:
        raise ConfigError(f"cannot open catalog: {exc}") from exc


def _fail(message: str) -> None:
    print(f"olac: {message}", file=sys.stderr)


# -- validate ----------------------------------------------------------


def _diagnostic_line(path: str, diagnostic) -> str:
    where = ""
    if diagnostic.element_index is not None:
        where = f" [element {diagnostic.element_index}]"
    return (f"{path}: {diagnostic.severity} {diagnostic.rule}: "
            f"{diagnostic.message}{where}")


def cmd_validate(args, config: CliConfig, registry: Registry) -> int:
    unreadable = False
    any_errors = False
    results = []
    for path_text in args.paths:
        path = Path(path_text)
        try:
            data = path.read_bytes()
        except OSError as exc:
            _fail(f"cannot read {path}: {exc.strerror or exc}")
            unreadable = True
            continue
        outcome = parse_record(data)
        diagnostics = list(outcome.diagnostics)
        if outcome.record is not None:
            diagnostics.extend(validate_record(outcome.record, registry))
        errors = [d for d in diagnostics if d.severity == "error"]
        if errors:
            any_errors = True
        results.append({
            "path": path_text,
            "ok": not errors,
            "diagnostics": [dataclasses.asdict(d) for d in diagnostics],
        })
        if not args.json:
            for diagnostic in diagnostics:
                print(_diagnostic_line(path_text, diagnostic))
            if not diagnostics:
                print(f"{path_text}: ok")
    if args.json:
        print(json.dumps(results, indent=2))
    if unreadable:
        return EXIT_ENV
    return EXIT_DOMAIN if any_errors else EXIT_OK


# -- servers -----------------------------------------------------------


def _serve_until_interrupted(server) -> int:
    try:
        server.start()
    except OSError as exc:
        _fail(f"cannot listen on {server.host}:{server.port}: {exc}")
        return EXIT_ENV
    # subprocess callers scrape the port from this line
    print(f"listening on {server.base_url}", file=sys.stderr, flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return EXIT_OK


def cmd_provider_serve(args, config: CliConfig, registry: Registry) -> int:
    try:
        repo = load_repository(args.directory)
    except (OSError, RepositoryError) as exc:
        _fail(f"cannot serve {args.directory}: {exc}")
        return EXIT_ENV
    host, port = split_listen(args.listen or config.listen_address)
    page_size = _pick_int("page_size", args.page_size, config.page_size)
    logging.getLogger("olac.provider_http").setLevel(logging.DEBUG)
    server = ProviderServer(repo, host=host, port=port,
                            page_size=page_size, registry=registry)
    return _serve_until_interrupted(server)


def cmd_catalog_serve(args, config: CliConfig, registry: Registry) -> int:
    static_dir = None
    if args.static:
        static_dir = Path(args.static)
        if not static_dir.is_dir():
            _fail(f"static bundle directory {static_dir} does not exist")
            return EXIT_ENV
    catalog = _open_catalog(config, registry)
    host, port = split_listen(args.listen or config.listen_address)
    logging.getLogger("olac.catalog_http").setLevel(logging.DEBUG)
    server = CatalogServer(catalog, host=host, port=port,
                           static_dir=static_dir)
    try:
        return _serve_until_interrupted(server)
    finally:
        catalog.close()


# -- harvest -----------------------------------------------------------


def _report_row(report) -> str:
    row = (f"{report.provider_id}\t{report.outcome}"
           f"\tadded={report.added}\tupdated={report.updated}"
           f"\tdeleted={report.deleted}\tpages={report.pages}")
    if report.error:
        row += f"\terror={report.error}"
    return row


def cmd_harvest(args, config: CliConfig, registry: Registry) -> int:
    if not args.urls and not args.all_providers:
        _fail("nothing to harvest; give provider URLs or --all")
        return EXIT_ENV
    catalog = _open_catalog(config, registry)
    try:
        return _run_harvest(args, config, catalog)
    finally:
        catalog.close()


def _run_harvest(args, config: CliConfig, catalog: Catalog) -> int:
    harvester = Harvester(
        catalog,
        retries=_pick_int("retries", args.retries, config.retries),
        parallelism=_pick_int("parallelism", args.parallelism,
                              config.parallelism))
    registration_failed = False
    targets = []
    for url in args.urls:
        try:
            targets.append(harvester.register_provider(url).archive_id)
        except DuplicateArchive as exc:
            targets.append(exc.archive_id)  # already known: just re-harvest
        except (Unreachable, BadIdentify) as exc:
            _fail(str(exc))
            registration_failed = True
    if args.all_providers:
        try:
            reports = harvester.harvest_all(args.mode)
        except NoProviders as exc:
            _fail(str(exc))
            return EXIT_DOMAIN
    else:
        reports = [harvester.harvest(provider_id, args.mode)
                   for provider_id in targets]
    if args.json:
        print(json.dumps([dataclasses.asdict(r) for r in reports], indent=2))
    else:
        for report in reports:
            print(_report_row(report))
    if registration_failed or any(r.failed for r in reports):
        return EXIT_DOMAIN
    return EXIT_OK


# -- query -------------------------------------------------------------


def cmd_query(args, config: CliConfig, registry: Registry) -> int:
    catalog = _open_catalog(config, registry)
    try:
        return _run_query(args, catalog)
    finally:
        catalog.close()


def _run_query(args, catalog: Catalog) -> int:
    try:
        if args.join:
            if args.clauses:
                _fail("--join takes --left/--right clauses, "
                      "not positional ones")
                return EXIT_ENV
            if not args.left or not args.right:
                _fail("--join needs at least one --left "
                      "and one --right clause")
                return EXIT_ENV
            left = Query(tuple(clause_from_text(t) for t in args.left))
            right = Query(tuple(clause_from_text(t) for t in args.right))
            pairs = join_payload(catalog, left, right, args.join)
            if args.json:
                print(json.dumps(pairs, indent=2))
            else:
                for pair in pairs:
                    print(f"{pair['left']['identifier']}"
                          f"\t{pair['right']['identifier']}"
                          f"\t{','.join(pair['shared'])}")
        else:
            if not args.clauses:
                _fail("give at least one ELEMENT:KIND:VALUE clause")
                return EXIT_ENV
            query = Query(tuple(clause_from_text(t) for t in args.clauses))
            summaries = [entry_summary(catalog, entry, query)
                         for entry in catalog.search(query)]
            if args.json:
                print(json.dumps(summaries, indent=2))
            else:
                for summary in summaries:
                    print(f"{summary['identifier']}\t{summary['title']}")
    except (VocabularyError, CatalogError, UnknownElement) as exc:
        _fail(str(exc))
        return EXIT_DOMAIN
    return EXIT_OK


# -- vocab -------------------------------------------------------------


def cmd_vocab_list(args, config: CliConfig, registry: Registry) -> int:
    if not args.vocabulary:
        for vocabulary_id in registry.vocabulary_ids:
            print(vocabulary_id)
        return EXIT_OK
    try:
        vocabulary = registry.vocabulary(args.vocabulary)
    except UnknownVocabulary as exc:
        _fail(str(exc))
        return EXIT_DOMAIN
    for term in vocabulary.terms:
        print(f"{term.code}\t{term.label()}")
    return EXIT_OK


# -- wiring ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olac",
        description="Language-resource metadata toolkit: validate, "
                    "serve, harvest, and query.")
    parser.add_argument("--config", metavar="FILE",
                        help="key=value settings file "
                             "(default: $OLAC_CONFIG if set)")
    parser.add_argument("--catalog-dir", metavar="DIR",
                        help="union catalog data directory")
    parser.add_argument("--vocab-dir", metavar="DIR",
                        help="vocabulary files to use instead of the "
                             "packaged set")
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    validate_p = sub.add_parser(
        "validate", help="check record files and print diagnostics")
    validate_p.add_argument("paths", nargs="+", metavar="PATH")
    validate_p.add_argument("--json", action="store_true",
                            help="machine-readable results on stdout")
    validate_p.set_defaults(func=cmd_validate)

    provider_p = sub.add_parser("provider",
                                help="run an archive's metadata endpoint")
    provider_sub = provider_p.add_subparsers(dest="subcommand",
                                             required=True)
    pserve = provider_sub.add_parser(
        "serve", help="answer the harvesting protocol over HTTP")
    pserve.add_argument("directory", metavar="DIRECTORY",
                        help="repository layout to serve")
    pserve.add_argument("--listen", metavar="HOST:PORT",
                        help="bind address (port 0 picks a free port)")
    pserve.add_argument("--page-size", type=int, metavar="N",
                        help="list responses page size")
    pserve.set_defaults(func=cmd_provider_serve)

    harvest_p = sub.add_parser(
        "harvest", help="pull provider contents into the catalog")
    harvest_p.add_argument("urls", nargs="*", metavar="URL",
                           help="provider base URLs to register and harvest")
    harvest_p.add_argument("--all", action="store_true",
                           dest="all_providers",
                           help="harvest every registered provider")
    mode = harvest_p.add_mutually_exclusive_group()
    mode.add_argument("--full", action="store_const", const="full",
                      dest="mode", help="fetch everything (default)")
    mode.add_argument("--incremental", action="store_const",
                      const="incremental", dest="mode",
                      help="fetch changes since the last success")
    harvest_p.set_defaults(mode="full")
    harvest_p.add_argument("--retries", type=int, metavar="N")
    harvest_p.add_argument("--parallelism", type=int, metavar="N")
    harvest_p.add_argument("--json", action="store_true",
                           help="machine-readable reports on stdout")
    harvest_p.set_defaults(func=cmd_harvest)

    query_p = sub.add_parser(
        "query", help="search the catalog")
    query_p.add_argument("clauses", nargs="*", metavar="ELEMENT:KIND:VALUE",
                         help="conjunctive clauses; KIND is code, text "
                              "or any")
    query_p.add_argument("--join", metavar="ELEMENT",
                         help="pair --left and --right results sharing "
                              "a code on ELEMENT")
    query_p.add_argument("--left", action="append", default=[],
                         metavar="CLAUSE")
    query_p.add_argument("--right", action="append", default=[],
                         metavar="CLAUSE")
    query_p.add_argument("--json", action="store_true",
                         help="machine-readable results on stdout")
    query_p.set_defaults(func=cmd_query)

    catalog_p = sub.add_parser("catalog", help="run the union catalog")
    catalog_sub = catalog_p.add_subparsers(dest="subcommand", required=True)
    cserve = catalog_sub.add_parser(
        "serve", help="expose the catalog JSON API over HTTP")
    cserve.add_argument("--listen", metavar="HOST:PORT",
                        help="bind address (port 0 picks a free port)")
    cserve.add_argument("--static", metavar="DIR",
                        help="web bundle to serve alongside the API")
    cserve.set_defaults(func=cmd_catalog_serve)

    vocab_p = sub.add_parser("vocab", help="inspect controlled vocabularies")
    vocab_sub = vocab_p.add_subparsers(dest="subcommand", required=True)
    vlist = vocab_sub.add_parser("list",
                                 help="list vocabulary ids or one "
                                      "vocabulary's terms")
    vlist.add_argument("vocabulary", nargs="?", metavar="VOCABULARY")
    vlist.set_defaults(func=cmd_vocab_list)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        registry = _load_registry(config)
        return args.func(args, config, registry)
    except ConfigError as exc:
        _fail(str(exc))
        return EXIT_ENV


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()

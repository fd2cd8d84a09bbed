"""``simulate`` command line entry point.

Exit codes: 0 on success, 2 for configuration errors, 3 for I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import parse_config, parse_overrides
from .errors import ConfigError
from .experiments import run, write_csv
from .presets import experiment_catalog, get_preset

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simulate", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--preset", help="start from a named preset (see --list-presets)")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key; may be repeated")
    p.add_argument("--out", help="CSV output path (overrides output_path)")
    p.add_argument("--list-presets", action="store_true", help="print preset names and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.list_presets:
        for p in experiment_catalog():
            print(f"{p.name}\t{p.description}")
        return EXIT_OK
    try:
        base = get_preset(args.preset).config_values() if args.preset else {}
    except KeyError as exc:
        print(f"config error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"I/O error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text, parse_overrides(args.set), base=base)
        out = args.out or cfg.output_path
        if not out:
            raise ConfigError("no output path; pass --out or set output_path", field="output_path")
        records = run(cfg, output_path=None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        write_csv(records, out)
    except OSError as exc:
        print(f"I/O error: cannot write {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

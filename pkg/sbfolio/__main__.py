"""Command-line interface

Usage:
    $ python -m sbfolio verify --config fig8 --restarts 10 --out results/fig8
    $ python -m sbfolio --list-presets

"""

import sys
import logging
import argparse

from . import api

VERBS = sorted(api.FAMILIES)


def make_parser():
    parser = argparse.ArgumentParser(prog="sbfolio")
    parser.add_argument("verb", nargs="?", choices=VERBS,
                        help="Command to run")
    parser.add_argument("--config",
                        help="Path to experiment file, or name of a preset")
    parser.add_argument("--seed", type=int,
                        help="Seed of market and solver")
    parser.add_argument("--restarts", type=int,
                        help="Solver restarts per solve")
    parser.add_argument("--threads", type=int,
                        help="Worker threads")
    parser.add_argument("--out",
                        help="Directory receiving the outputs")
    parser.add_argument("--debug", action="store_true",
                        help="Enable debug-mode")
    parser.add_argument("--list-presets", action="store_true",
                        help="List available presets and exit")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)

    log = logging.getLogger("sbfolio")
    log.setLevel(logging.DEBUG if args.debug else logging.INFO)

    api.install()

    try:
        if args.list_presets:
            for name in api.list_presets():
                print(name)
            return 0

        if not args.verb or not args.config:
            parser.error("a verb and --config are required")

        if args.out:
            api.register_root(args.out)

        api.register_override("command", args.verb)
        for key in ("seed", "restarts", "threads"):
            api.register_override(key, getattr(args, key))

        context = api.publish(args.config)
        failed = api.errors(context)

        for result in failed:
            log.error("%s: %s" % (result["plugin"].__name__,
                                  result["error"]))

        return 1 if failed else 0

    finally:
        api.uninstall()


if __name__ == "__main__":
    sys.exit(main())

"""
Thue2DLite command line

    thue2dlite {compile|rewrite|countermodel|eval|check-model|verify|enumerate} ...

Exit codes: 0 success / satisfied / Equivalent, 1 not satisfied / model
violations / failed verify, 2 Unknown / no countermodel within bounds,
3 unsafe query or input error, 64 usage error.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from src.core.checks_registry import get_enumeration_checks
from src.core.config import Config, load_config
from src.core.errors import ConfigError, Thue2DLiteError, UsageError
from src.interface.commands import (
    EXIT_INPUT,
    EXIT_USAGE,
    VARIANTS,
    CommandResult,
    cmd_check_model,
    cmd_compile,
    cmd_countermodel,
    cmd_enumerate,
    cmd_eval,
    cmd_rewrite,
)
from src.interface.verification import cmd_verify

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 64"""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='print the machine-readable report')
    common.add_argument('--config', help='JSON config file (default: $THUE2DLITE_CONFIG or ~/.thue2dlite/config.json)')
    common.add_argument('--verbose', '-v', action='store_true', help='debug logging')

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument('--max-steps', type=int, help='rewrite search expansion budget')
    search.add_argument('--max-word-len', type=int, help='longest word the rewrite search visits')
    search.add_argument('--max-order', type=int, help='largest separating semigroup order tried')

    semantics = argparse.ArgumentParser(add_help=False)
    semantics.add_argument('--una', action=argparse.BooleanOptionalAction, default=None,
                           help='unique name assumption')
    semantics.add_argument('--pcwa', action=argparse.BooleanOptionalAction, default=None,
                           help='partial closed world assumption')

    parser = ArgumentParser(prog='thue2dlite', description='Thue word problems as DL-Lite query entailment')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    p = sub.add_parser('compile', parents=[common], help='write ontology, query and manifest for a variant')
    p.add_argument('instance')
    p.add_argument('--variant', default='neq', help=f"one of {', '.join(VARIANTS)}")
    p.add_argument('--out', default='.', help='output directory')
    p.add_argument('--depth', type=int, help='chase depth reported in the manifest')
    p.add_argument('--phi-negate-T', dest='phi_negate_T', action='store_true', default=None,
                   help='also forbid T between distinguished variables of phi')

    p = sub.add_parser('rewrite', parents=[common, search], help='bounded search for a rewrite path')
    p.add_argument('instance')

    p = sub.add_parser('countermodel', parents=[common, search], help='build and verify a finite countermodel')
    p.add_argument('instance')
    p.add_argument('--variant', default='neq', help=f"one of {', '.join(VARIANTS)}")
    p.add_argument('--out', default='.', help='output directory')
    p.add_argument('--phi-negate-T', dest='phi_negate_T', action='store_true', default=None)

    p = sub.add_parser('eval', parents=[common, semantics], help='evaluate a .cq union on a .struct model')
    p.add_argument('query')
    p.add_argument('model')
    p.add_argument('--ontology', help='also model-check against this .onto file')

    p = sub.add_parser('check-model', parents=[common, semantics], help='check a .struct model against a .onto file')
    p.add_argument('model')
    p.add_argument('ontology')

    p = sub.add_parser('verify', parents=[common, search], help='run the verification suite on an instance')
    p.add_argument('instance')
    p.add_argument('--max-vertices', type=int, help='largest enumerated structure size')
    p.add_argument('--phi-negate-T', dest='phi_negate_T', action='store_true', default=None)

    p = sub.add_parser('enumerate', parents=[common], help='exhaustive property run over small structures',
                       description='Runs a property over every structure up to --max-vertices. T is fixed to '
                                   '{(a,a)} unless --vary-t is given, so a clean run without it does not cover '
                                   'every T relation.')
    p.add_argument('instance', help='instance whose alphabet and rules are used')
    p.add_argument('--check', required=True, help=f"one of {', '.join(get_enumeration_checks())}")
    p.add_argument('--max-vertices', type=int, help='largest structure size')
    p.add_argument('--vary-t', action='store_true',
                   help='enumerate every T relation instead of fixing T to {(a,a)}')
    return parser


def resolve_config(args: argparse.Namespace) -> Config:
    config = load_config(args.config)
    overrides = {
        'max_expansions': getattr(args, 'max_steps', None),
        'max_word_len': getattr(args, 'max_word_len', None),
        'max_semigroup_order': getattr(args, 'max_order', None),
        'chase_depth': getattr(args, 'depth', None),
        'enum_max_vertices': getattr(args, 'max_vertices', None),
        'una': getattr(args, 'una', None),
        'pcwa': getattr(args, 'pcwa', None),
        'phi_negate_T': getattr(args, 'phi_negate_T', None),
        'log_level': 'DEBUG' if args.verbose else None,
    }
    return config.updated(**overrides)


def dispatch(args: argparse.Namespace, config: Config) -> CommandResult:
    if args.command == 'compile':
        return cmd_compile(args.instance, args.variant, args.out, config)
    if args.command == 'rewrite':
        return cmd_rewrite(args.instance, config)
    if args.command == 'countermodel':
        return cmd_countermodel(args.instance, args.variant, args.out, config)
    if args.command == 'eval':
        return cmd_eval(args.query, args.model, config, args.ontology)
    if args.command == 'check-model':
        return cmd_check_model(args.model, args.ontology, config)
    if args.command == 'verify':
        return cmd_verify(args.instance, config)
    if args.command == 'enumerate':
        return cmd_enumerate(args.instance, config.enum_max_vertices, args.check, config, args.vary_t)
    raise UsageError(f"unknown command '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(level=getattr(logging, config.log_level.upper(), logging.WARNING),
                        format='%(asctime)s %(name)s %(levelname)s %(message)s')

    try:
        result = dispatch(args, config)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (Thue2DLiteError, OSError) as e:
        logger.debug("input error", exc_info=True)
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_INPUT

    if args.json:
        print(json.dumps(result.payload, ensure_ascii=False, indent=2))
    else:
        for line in result.lines:
            print(line)
    return result.exit_code

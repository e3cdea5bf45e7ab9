"""
SatakeForge - Command-line front end

Usage:
    python scripts/cli.py type inspect --config job.toml
    python scripts/cli.py hecke present --config job.toml --out table.tsv
    python scripts/cli.py hecke mul --config job.toml
    python scripts/cli.py hecke reduce --config job.toml
    python scripts/cli.py satake gl2 --config job.toml
    python scripts/cli.py frob eval --config job.toml
    python scripts/cli.py galois eval --config job.toml
    python scripts/cli.py verify conv-oracle --p 3 --n 2 --out results/

Tables are written as TSV, structured results as JSON with sorted keys.
Exit codes: 0 pass, 1 failed identity, 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from bk_frobenius import family_from_spec, function_table
from config import DEFAULT_SEED, DEFAULT_TRIALS, load_job_config, setup_logging
from coset_oracle import in_y_span, satake_oracle_gl2
from errors import ConfigError, SatakeForgeError, ShapeIdentityFailure
from galois_points import (
    S_sigma_on_points, eval_fbar, is_supersingular, levi_image, point_from_spec, stratum_label, torus_eval,
)
from hecke import integral_membership, parse_hecke, presentation_table, reduction_map, type_level
from root_data import Weight
from tame_types import (
    SerreWeight, TameInertialType, build_type, deepness, dual, is_m_generic, lowest_alcove_presentation,
    serre_weight, valid_orientations,
)
from verify_suites import SUITES, SuiteRunner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Config sections
# ---------------------------------------------------------------------------

def _section(cfg: Dict[str, Any], name: str) -> Dict[str, Any]:
    if name not in cfg:
        raise ConfigError(f"config has no [{name}] section")
    return cfg[name]


def _int_field(table: Dict[str, Any], section: str, key: str, default: Optional[int] = None) -> int:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing field: {key}")
        return default
    try:
        return int(table[key])
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] field {key} must be an integer, got {table[key]!r}")


def _weight_field(value, section: str) -> Weight:
    try:
        return Weight(tuple(tuple(int(x) for x in comp) for comp in value))
    except (TypeError, ValueError):
        raise ConfigError(f"[{section}] lambda must be a list of integer lists, got {value!r}")


def type_from_config(cfg: Dict[str, Any]) -> TameInertialType:
    """[type] with a 1-based s_tau"""
    table = _section(cfg, 'type')
    s_tau = [int(i) - 1 for i in table['s_tau']]
    return build_type(
        _int_field(table, 'type', 'p'), _int_field(table, 'type', 'e', 1), _int_field(table, 'type', 'f'),
        _int_field(table, 'type', 'n'), [int(a) for a in table['a_prime']], s_tau,
    )


def weight_from_config(cfg: Dict[str, Any]) -> SerreWeight:
    table = _section(cfg, 'weight')
    return serre_weight(
        _int_field(table, 'weight', 'p'), _int_field(table, 'weight', 'f'), _int_field(table, 'weight', 'n'),
        _weight_field(table['lambda'], 'weight'),
    )


def _presentation_dict(pres) -> Dict[str, Any]:
    return {'s': [[i + 1 for i in w] for w in pres.s], 'mu': pres.mu.to_list()}


def _hecke_lambda(cfg: Dict[str, Any]) -> Optional[Weight]:
    table = cfg.get('hecke', {})
    return _weight_field(table['lambda'], 'hecke') if 'lambda' in table else None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_type_inspect(cfg: Dict[str, Any], args) -> Dict[str, Any]:
    t = type_from_config(cfg)
    generic = -1
    while generic + 1 < t.p and is_m_generic(t, generic + 1):
        generic += 1
    result: Dict[str, Any] = {
        'type': t.to_dict(),
        'presentation': _presentation_dict(lowest_alcove_presentation(t)),
        'orientations': [[[i + 1 for i in w] for w in base] for base in valid_orientations(t)],
        'genericity': generic,
        'dual': dual(t).to_dict(),
    }
    if 'weight' in cfg:
        sigma = weight_from_config(cfg)
        result['weight'] = {**sigma.to_dict(), 'lambda_f': list(sigma.lambda_f), 'deepness': deepness(sigma)}
    return result


def cmd_hecke_present(cfg: Dict[str, Any], args) -> List[Dict[str, Any]]:
    level = type_level(type_from_config(cfg))
    return presentation_table(level, _hecke_lambda(cfg))


def cmd_hecke_mul(cfg: Dict[str, Any], args) -> Dict[str, Any]:
    level = type_level(type_from_config(cfg))
    table = _section(cfg, 'hecke')
    if 'other' not in table:
        raise ConfigError("[hecke] missing field: other (right factor for hecke mul)")
    left = parse_hecke(str(table['element']), level)
    right = parse_hecke(str(table['other']), level)
    product = left * right
    return {
        'left': left.to_text(),
        'right': right.to_text(),
        'product': product.to_text(),
        'integral': integral_membership(product, _hecke_lambda(cfg)) if product.is_symmetric() else None,
    }


def cmd_hecke_reduce(cfg: Dict[str, Any], args) -> Dict[str, Any]:
    level = type_level(type_from_config(cfg))
    h = parse_hecke(str(_section(cfg, 'hecke')['element']), level)
    sigma = weight_from_config(cfg) if 'weight' in cfg else None
    image = reduction_map(level, h, sigma, _hecke_lambda(cfg))
    return {'element': h.to_text(), 'image': image.to_text(), 'image_x': str(image.to_x_expr())}


def cmd_satake_gl2(cfg: Dict[str, Any], args) -> List[Dict[str, Any]]:
    sigma = weight_from_config(cfg)
    if (sigma.n, sigma.f) != (2, 1):
        raise ConfigError(f"satake gl2 needs a [weight] with n = 2 and f = 1, got n={sigma.n}, f={sigma.f}")
    lam = sigma.lambda_1.entries[0]
    r, m = lam[0] - lam[1], lam[1]
    mus = cfg.get('satake', {}).get('mu', [[-1, 0], [-1, -1]])
    rows = []
    for mu in mus:
        image = satake_oracle_gl2(sigma.p, r, m, tuple(int(x) for x in mu))
        rows.append({'p': sigma.p, 'r': r, 'm': m, 'mu': str(list(mu)), 'image': str(image),
                     'y_span': in_y_span(image)})
    return rows


def cmd_frob_eval(cfg: Dict[str, Any], args) -> List[Dict[str, Any]]:
    t = type_from_config(cfg)
    spec = dict(_section(cfg, 'family'))
    if args.trunc is not None:
        spec['trunc'] = args.trunc
    if args.seed is not None:
        spec.setdefault('seed', args.seed)
    fam = family_from_spec(t, spec)
    lam = _weight_field(spec['lambda'], 'family') if 'lambda' in spec else None
    return function_table(fam, lam)


def cmd_galois_eval(cfg: Dict[str, Any], args) -> Dict[str, Any]:
    sigma = weight_from_config(cfg)
    table = cfg.get('point', {})
    point = point_from_spec(sigma, table, e=_int_field(table, 'point', 'e', 1))
    result: Dict[str, Any] = {
        'weight': sigma.to_dict(),
        'point': point.to_dict(),
        'fbar': [eval_fbar(sigma, i, point).to_text() for i in range(1, sigma.n + 1)],
        'stratum': list(stratum_label(sigma, point)),
        'supersingular': is_supersingular(sigma, point),
    }
    if 'hecke' in cfg:
        result['torus_value'] = torus_eval(S_sigma_on_points(point), str(cfg['hecke']['element'])).to_text()
    if 'levi' in table:
        blocks = levi_image(sigma, point, [int(i) for i in table['levi']])
        result['levi'] = [{'weight': b.to_dict(), 'point': pt.to_dict()} for b, pt in blocks]
    return result


COMMANDS = {
    ('type', 'inspect'): cmd_type_inspect,
    ('hecke', 'present'): cmd_hecke_present,
    ('hecke', 'mul'): cmd_hecke_mul,
    ('hecke', 'reduce'): cmd_hecke_reduce,
    ('satake', 'gl2'): cmd_satake_gl2,
    ('frob', 'eval'): cmd_frob_eval,
    ('galois', 'eval'): cmd_galois_eval,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def write_table(rows: List[Dict[str, Any]], out: Optional[Path]):
    frame = pd.DataFrame(rows)
    if out is None:
        frame.to_csv(sys.stdout, sep='\t', index=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out, sep='\t', index=False)
        logger.info(f"💾 Wrote {len(frame)} row(s) to {out}")


def write_json(data: Any, out: Optional[Path]):
    text = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, default=str)
    if out is None:
        print(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding='utf-8')
        logger.info(f"💾 Wrote {out}")


def run_verify(args) -> int:
    runner = SuiteRunner(
        seed=args.seed if args.seed is not None else DEFAULT_SEED,
        trials=args.trials if args.trials is not None else DEFAULT_TRIALS,
        depth=args.depth, trunc=args.trunc, p=args.p, n=args.n,
    )
    if args.target == 'all':
        results = runner.run_all()
    else:
        results = [runner.run(args.target)]

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for r in results:
            if r.rows:
                write_table(r.rows, args.out / f"{r.name}.tsv")
        summary = {r.name: {'passed': r.passed, 'checked': r.checked, 'failures': r.failures} for r in results}
        write_json(summary, args.out / "summary.json")

    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog='satake-forge',
        description="Exact computations on the mod p Satake / Hecke / Galois dictionary for GL_n.",
    )
    parser.add_argument('command', choices=sorted({c for c, _ in COMMANDS} | {'verify'}))
    parser.add_argument('target', help="subcommand, or for verify a suite name or 'all'")
    parser.add_argument('--config', type=Path, default=None, help="TOML job config")
    parser.add_argument('--seed', type=int, default=None, help=f"random seed (default: {DEFAULT_SEED})")
    parser.add_argument('--trials', type=int, default=None, help="trial count override for verify")
    parser.add_argument('--out', type=Path, default=None, help="output file (directory for verify)")
    parser.add_argument('--depth', type=int, default=None, help="lattice depth N for the coset oracle")
    parser.add_argument('--trunc', type=int, default=None, help="v-adic truncation for Frobenius families")
    parser.add_argument('--p', type=int, default=None, help="prime for verify suites")
    parser.add_argument('--n', type=int, default=None, help="rank for verify suites")
    parser.add_argument('--log-level', default=None, help="DEBUG, INFO, WARNING, ...")
    return parser.parse_args(argv)


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    args = parse_args(argv)
    setup_logging(args.log_level.upper() if args.log_level else None)

    try:
        if args.command == 'verify':
            if args.target != 'all' and args.target not in SUITES:
                raise ConfigError(f"unknown suite {args.target!r}; choose one of {', '.join(SUITES)} or all")
            return run_verify(args)

        handler = COMMANDS.get((args.command, args.target))
        if handler is None:
            choices = ", ".join(sub for c, sub in COMMANDS if c == args.command)
            raise ConfigError(f"unknown subcommand {args.command} {args.target}; choose one of {choices}")
        if args.config is None:
            raise ConfigError(f"{args.command} {args.target} needs --config")
        cfg = load_job_config(args.config)

        result = handler(cfg, args)
        if isinstance(result, list):
            write_table(result, args.out)
        else:
            write_json(result, args.out)
        return EXIT_OK

    except ShapeIdentityFailure as e:
        logger.error(f"❌ Identity failed: {e}")
        return EXIT_FAILED
    except (ConfigError, SatakeForgeError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE
    except KeyError as e:
        logger.error(f"❌ Missing config field: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"❌ Unexpected error: {e}")
        raise


if __name__ == "__main__":
    sys.exit(main())

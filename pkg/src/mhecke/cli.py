"""Command line: ``mhecke <subcommand> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
3 numerical precision failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .cache import ClassCache, default_cache_dir
from .errors import MHeckeError, PrecisionLoss, RecognitionFailed
from .forms import expand, named_form, spec_from_json
from .prodexp import ProductExpansion, from_exponents, pd_series, to_exponents

CONFIG_ENV = "MHECKE_CONFIG"
SCHEMA = "1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    terms: int = 20
    prec: int = 256
    discriminants: tuple = ()
    level: int | None = None
    cache_dir: Path | None = field(default_factory=default_cache_dir)
    output: str = "table"

    def validate(self) -> "RunConfig":
        if self.terms < 4:
            raise ConfigError("terms must be at least 4")
        if self.prec < 64:
            raise ConfigError("prec must be at least 64 bits")
        if self.output not in ("json", "table"):
            raise ConfigError("output must be json or table")
        if self.cache_dir is not None:
            try:
                Path(self.cache_dir).mkdir(parents=True, exist_ok=True)
                if not os.access(self.cache_dir, os.W_OK):
                    raise OSError
            except OSError:
                raise ConfigError(f"cache directory {self.cache_dir} is not writable "
                                  "(use --no-cache)") from None
        return self


_KEYS = {"terms", "prec", "discriminants", "level", "cache_dir", "output", "cache"}


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """key = value lines; '#' starts a comment."""
    cfg = base or RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in ("terms", "prec"):
                cfg = replace(cfg, **{key: int(value)})
            elif key == "level":
                cfg = replace(cfg, level=int(value))
            elif key == "discriminants":
                cfg = replace(cfg, discriminants=tuple(int(x) for x in value.replace(",", " ").split()))
            elif key == "cache_dir":
                cfg = replace(cfg, cache_dir=Path(value).expanduser())
            elif key == "cache":
                if value.lower() in ("off", "false", "no", "0"):
                    cfg = replace(cfg, cache_dir=None)
                elif value.lower() not in ("on", "true", "yes", "1"):
                    raise ValueError(value)
            else:
                cfg = replace(cfg, output=value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {value!r} for {key}") from None
    return cfg


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
        cfg = parse_config_text(text, cfg)
    if args.terms is not None:
        cfg = replace(cfg, terms=args.terms)
    if args.prec is not None:
        cfg = replace(cfg, prec=args.prec)
    if args.cache_dir is not None:
        cfg = replace(cfg, cache_dir=Path(args.cache_dir))
    if args.no_cache:
        cfg = replace(cfg, cache_dir=None)
    if args.json:
        cfg = replace(cfg, output="json")
    return cfg.validate()


class Session:
    """Config plus the class cache; handed to the verification harness."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.cache = ClassCache(cfg.cache_dir)

    @property
    def prec(self):
        return self.cfg.prec

    @property
    def terms(self):
        return self.cfg.terms

    def class_source(self, d, N, D):
        return self.cache.all_classes(d, N, D)

    def class_source_single(self, d, N, beta):
        return self.cache.get(d, N, beta)


# ---------------------------------------------------------------------------
# helpers


def _emit(cfg: RunConfig, payload: dict, table: str):
    if cfg.output == "json":
        print(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, indent=1))
    else:
        print(table)


def _form_series(text: str, T: int, session: Session):
    """A form given by short name, FormSpec JSON (inline or a file), or borcherds:D:d:N."""
    text = text.strip()
    if text.startswith("borcherds:"):
        from .traces import twisted_borcherds_numeric
        try:
            D, d, N = (int(x) for x in text.split(":")[1:])
        except ValueError:
            raise ValueError(f"expected borcherds:D:d:N, got {text!r}") from None
        return twisted_borcherds_numeric(D, d, N, session.prec, T)
    return expand(_form_spec(text), T, integral=True)


def _form_spec(text: str):
    if text.startswith("{"):
        return spec_from_json(text)
    if os.path.exists(text):
        return spec_from_json(Path(text).read_text())
    return named_form(text)


def _series_table(s) -> str:
    from .field import scalar_str
    rows = [f"q^{scalar_str(s.offset + k)}: {scalar_str(c)}" for k, c in enumerate(s.coeffs)]
    return "\n".join(rows) + f"\n(known modulo q^{scalar_str(s.precision)})"


def _pe_table(pe: ProductExpansion) -> str:
    from .field import scalar_str
    lines = [f"h = {pe.h}, D = {pe.D}, T = {pe.T}"]
    lines += [f"c({pe.D},{n}) = {scalar_str(pe[n])}" for n in range(1, pe.T)]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def cmd_pd(args, session):
    s = pd_series(args.D, session.terms)
    _emit(session.cfg, {"series": s.to_json()}, _series_table(s))
    return EXIT_OK


def cmd_expand(args, session):
    f = _form_series(args.form, session.terms, session)
    if args.series:
        _emit(session.cfg, {"series": f.to_json()}, _series_table(f))
        return EXIT_OK
    pe = to_exponents(f, args.D)
    _emit(session.cfg, {"exponents": pe.to_json()}, _pe_table(pe))
    return EXIT_OK


def cmd_reconstruct(args, session):
    try:
        obj = json.loads(Path(args.exponents).read_text()) if os.path.exists(args.exponents) \
            else json.loads(args.exponents)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read exponents: {exc}") from None
    pe = ProductExpansion.from_json(obj.get("exponents", obj))
    s = from_exponents(pe)
    _emit(session.cfg, {"series": s.to_json()}, _series_table(s))
    return EXIT_OK


def cmd_hecke(args, session):
    from .hecke import is_mult_eigenform, mh_exponents, mh_series_direct
    f = _form_series(args.form, session.terms, session)
    if args.eigen:
        primes = tuple(int(p) for p in args.eigen.split(","))
        v = is_mult_eigenform(f, primes, args.N)
        _emit(session.cfg, {"verdict": str(v), "eigenform": v.eigenform}, str(v))
        return EXIT_OK
    if args.direct:
        g = mh_series_direct(f, args.n, args.N)
        _emit(session.cfg, {"series": g.to_json()}, _series_table(g))
        return EXIT_OK
    pe = mh_exponents(to_exponents(f, args.D), args.n, args.N)
    _emit(session.cfg, {"exponents": pe.to_json()}, _pe_table(pe))
    return EXIT_OK


def cmd_classes(args, session):
    from .quadforms import betas, class_representatives
    if args.bound is not None:
        if args.beta is None:
            raise ValueError("--bound needs --beta")
        lists = [class_representatives(args.d, args.N, args.beta, method="search", bound=args.bound)]
    elif args.beta is not None:
        lists = [session.cache.get(args.d, args.N, args.beta)]
    else:
        bs = betas(args.d, args.N)
        if not bs:
            from .errors import InconsistentSquareCondition
            raise InconsistentSquareCondition(f"-{args.d} is not a square modulo {4 * args.N}")
        lists = [session.cache.get(args.d, args.N, b) for b in bs]
    if args.D is not None:
        lists = [cl.with_character(args.D) for cl in lists]
    lines = []
    for cl in lists:
        lines.append(f"d={cl.d} N={cl.N} beta={cl.beta}: {len(cl)} classes")
        for e in cl.reps:
            chi = f" chi={e.chi}" if cl.D is not None else ""
            lines.append(f"  {e.form}  omega={e.omega}{chi}")
    _emit(session.cfg, {"class_lists": [cl.to_json() for cl in lists]}, "\n".join(lines))
    return EXIT_OK


def _trace_fn(text: str, N: int):
    from .forms import Faber, Hauptmodul
    if text.startswith("faber:") and text.count(":") == 1:
        return Faber(N, int(text.split(":")[1]))
    if text == "hauptmodul":
        return Hauptmodul(N)
    return _form_spec(text)


def cmd_trace(args, session):
    from .traces import twisted_trace
    fn = _trace_fn(args.fn, args.N)
    rep = twisted_trace(args.D, args.d, args.N, fn, session.prec, session.terms,
                        class_source=session.class_source)
    table = (f"(1/sqrt({args.D})) Tr_{{{args.D},{args.d}}}({rep.label}) = {rep.recognized}"
             f"  (residual {rep.residual:.2e})\n"
             + "\n".join(f"  {'PASS' if ok else 'FAIL'}  {c}" for c, ok in rep.verdicts))
    _emit(session.cfg, {"trace": rep.to_json()}, table)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_verify_paper(args, session):
    from .harness import GROUPS, checks, run_checks
    only = None
    if args.only:
        only = {x.strip() for x in args.only.split(",") if x.strip()}
        known = set(GROUPS) | {c.id for c in checks()}
        unknown = only - known
        if unknown:
            raise ValueError(f"unknown check group or id: {', '.join(sorted(unknown))}")
    results = run_checks(session, only)
    failed = [r for r in results if not r.ok]
    lines = [f"{'PASS' if r.ok else 'FAIL'}  {r.id:30s} expected {r.expected}; got {r.got}"
             + (f"  [{r.ms:.0f} ms]" if args.timings else "") for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    payload = {"checks": [r.to_json(args.timings) for r in results],
               "passed": str(len(results) - len(failed)), "total": str(len(results))}
    _emit(session.cfg, payload, "\n".join(lines))
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _global_flags(p: argparse.ArgumentParser, default):
    p.add_argument("--terms", type=int, default=default, help="truncation T (number of coefficients)")
    p.add_argument("--prec", type=int, default=default, help="working precision in bits")
    p.add_argument("--cache-dir", default=default, help="directory of the class cache")
    p.add_argument("--no-cache", action="store_true", default=default, help="disable the class cache")
    p.add_argument("--json", action="store_true", default=default, help="JSON output")
    p.add_argument("--config", default=default, help=f"key=value config file (default: ${CONFIG_ENV})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhecke", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mhecke {__version__}")
    _global_flags(parser, None)
    # the same flags after the subcommand; SUPPRESS keeps the top-level values
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pd", parents=[common], help="expansion of P_D(t)")
    p.add_argument("--D", type=int, required=True)
    p.set_defaults(func=cmd_pd)

    p = sub.add_parser("expand", parents=[common], help="product exponents c(D, n) of a form")
    p.add_argument("--form", required=True,
                   help="name (j, delta, hauptmodul:N, faber:N:n, level11, level9), "
                        "borcherds:D:d:N, FormSpec JSON or a JSON file")
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--series", action="store_true", help="print the q-expansion instead")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("reconstruct", parents=[common], help="q-expansion from product exponents")
    p.add_argument("--exponents", required=True, help="ProductExpansion JSON or a file holding it")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("hecke", parents=[common], help="multiplicative Hecke operator")
    p.add_argument("--form", required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--direct", action="store_true", help="act on the q-expansion (n prime)")
    p.add_argument("--eigen", metavar="P,P,...", help="test f|T~(p) = f^m for these primes")
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("classes", parents=[common], help="Gamma0(N)-classes of forms")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--beta", type=int)
    p.add_argument("--D", type=int, help="attach the genus character chi_D")
    p.add_argument("--bound", type=int, help="bounded search |b| <= BOUND instead of the coset method")
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("trace", parents=[common], help="twisted trace of singular moduli")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--fn", default="faber:1", help="faber:n, hauptmodul, or a FormSpec (JSON/file)")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify-paper", parents=[common], help="run the reference checks")
    p.add_argument("--only", help="comma separated groups or check ids")
    p.add_argument("--timings", action="store_true", help="report per-check runtimes")
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"mhecke: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    session = Session(cfg)
    try:
        return args.func(args, session)
    except (PrecisionLoss, RecognitionFailed) as exc:
        print(f"mhecke: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (MHeckeError, ValueError, ZeroDivisionError) as exc:
        print(f"mhecke: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""
Command-line front end: ``tractorlab <subcommand> [flags]``.

Each subcommand writes one JSON report (to ``--out`` or standard output) and
exits 0 when every check passed, 1 when a check failed, and 2 on a usage
error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import checks
from .fixtures import FixtureExists, dump_json, fixture_dir, fixture_path, write_fixture
from .reports import emit_report, make_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SUITES = {
    "cohomology": ("single", "sweep", "structure"),
    "normalize": ("sphere",),
    "conformal-check": ("curvature", "bianchi", "holonomy", "transport", "operators", "rescale"),
    "einstein-solve": ("recover",),
    "transform-check": ("laws", "displays", "cross-layer", "all"),
}


class UsageError(Exception):
    pass


@dataclass
class CommandConfig:
    subcommand: str
    algebra: Optional[str] = None
    rep: Optional[str] = None
    degree: Optional[int] = None
    chart: Optional[str] = None
    n: Optional[int] = None
    suite: Optional[str] = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    samples: Optional[int] = None
    out: Optional[str] = None
    force: bool = False
    flags: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc) -> "CommandConfig":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(**doc)


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name not in checks.DEFAULT_TOLS:
            raise UsageError("--tol expects name=value with name in %s" % ", ".join(sorted(checks.DEFAULT_TOLS)))
        try:
            out[name] = float(value)
        except ValueError:
            raise UsageError("tolerance %r is not a number" % value) from None
    return out


def _parse_algebra(text):
    from .lie_core import build_algebra, parse_algebra_spec

    try:
        kind, params = parse_algebra_spec(text)
        build_algebra(kind, params)  # rejects unsupported kinds and parameters early
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError("bad --algebra %r: %s" % (text, exc)) from None
    return kind, params


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument("--out", metavar="PATH", help="write the JSON report here instead of stdout")

    p = argparse.ArgumentParser(prog="tractorlab", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    c = sub.add_parser("cohomology", parents=[common], help="Lie algebra cohomology and Hodge data")
    c.add_argument("--suite", choices=SUITES["cohomology"], default=None,
                   help="single complex (default when --algebra is given), the full sweep, or the structure claims")
    c.add_argument("--algebra", metavar="KIND:PARAMS")
    c.add_argument("--rep", choices=("adjoint", "standard"), default="adjoint")
    c.add_argument("--degree", type=int)
    c.add_argument("--irreducibles", action="store_true", help="also count irreducible g_0-components")
    c.add_argument("--basis", action="store_true", help="include the exact harmonic basis")

    nz = sub.add_parser("normalize", parents=[common], help="Rho normalization and d* as a trace")
    nz.add_argument("--algebra", metavar="conformal:N", help="restrict to one conformal algebra")
    nz.add_argument("--samples", type=int, default=5, help="random constant curvatures per algebra")

    cc = sub.add_parser("conformal-check", parents=[common], help="numeric conformal calculus suites")
    cc.add_argument("--suite", choices=SUITES["conformal-check"], required=True)
    cc.add_argument("--chart", choices=("flat", "sphere", "poly"), default="sphere")
    cc.add_argument("--n", type=int, default=3)
    cc.add_argument("--samples", type=int)

    es = sub.add_parser("einstein-solve", parents=[common],
                        help="Einstein scales from parallel tractors and back")
    es.add_argument("--chart", choices=("flat", "sphere"), default="sphere")
    es.add_argument("--n", type=int, default=3)
    es.add_argument("--samples", type=int, default=3)
    es.add_argument("--step", type=float, default=1e-3, help="RK4 step along radial paths")

    tc = sub.add_parser("transform-check", parents=[common], help="transformation laws")
    tc.add_argument("--suite", choices=SUITES["transform-check"], default="all")
    tc.add_argument("--chart", choices=("flat", "sphere", "poly"), default="poly")
    tc.add_argument("--n", type=int, default=3)
    tc.add_argument("--samples", type=int, default=100)

    fx = sub.add_parser("fixtures", parents=[common], help="regenerate or verify the frozen fixtures")
    fx.add_argument("--force", action="store_true", help="overwrite existing fixture files")
    fx.add_argument("--check", action="store_true", help="only compare the frozen files with fresh builds")
    return p


def _config(args) -> CommandConfig:
    known = {"subcommand", "algebra", "rep", "degree", "chart", "n", "suite", "tol", "seed", "samples", "out",
             "force"}
    flags = {k: v for k, v in vars(args).items() if k not in known}
    return CommandConfig(subcommand=args.subcommand, algebra=getattr(args, "algebra", None),
                         rep=getattr(args, "rep", None), degree=getattr(args, "degree", None),
                         chart=getattr(args, "chart", None), n=getattr(args, "n", None),
                         suite=getattr(args, "suite", None), tolerances=_parse_tol(args.tol), seed=args.seed,
                         samples=getattr(args, "samples", None), out=args.out,
                         force=bool(getattr(args, "force", False)), flags=flags)


def _chart(cfg):
    from .conformal.charts import ChartError, builtin_chart

    if cfg.n is None or cfg.n < 3:
        raise UsageError("--n must be at least 3")
    try:
        return builtin_chart(cfg.chart, cfg.n)
    except ChartError as exc:
        raise UsageError(str(exc)) from None


def run_cohomology(cfg):
    suite = cfg.suite or ("single" if cfg.algebra else None)
    if suite is None:
        raise UsageError("cohomology needs --algebra or --suite sweep|structure")
    if suite == "sweep":
        return checks.cohomology_sweep(), {}
    if suite == "structure":
        return checks.cohomology_structure(), {}
    if not cfg.algebra:
        raise UsageError("--suite single needs --algebra")
    kind, params = _parse_algebra(cfg.algebra)
    from .cohomology import DegreeError

    try:
        rows = checks.cohomology_single(kind, params, cfg.rep, cfg.degree,
                                        irreducibles=cfg.flags.get("irreducibles", False),
                                        basis=cfg.flags.get("basis", False))
    except DegreeError as exc:
        raise UsageError(str(exc)) from None
    extra = {}
    if cfg.degree is not None:
        extra = {"dim_H": rows[0]["dim_H"], "homogeneity_histogram": rows[0]["homogeneity_histogram"]}
    return rows, extra


def run_normalize(cfg):
    ns = (3, 4, 5)
    if cfg.algebra:
        kind, params = _parse_algebra(cfg.algebra)
        if kind != "conformal":
            raise UsageError("normalize works on conformal algebras only")
        ns = (params[0],)
    return checks.normalize_suite(ns, seed=cfg.seed, samples=cfg.samples or 5), {}


def run_conformal(cfg):
    chart = _chart(cfg)
    tols = cfg.tolerances
    s = cfg.suite
    kw = {"samples": cfg.samples} if cfg.samples else {}
    if s == "curvature":
        return checks.curvature_checks_suite(chart, seed=cfg.seed, tols=tols, **kw), {}
    if s == "bianchi":
        return checks.bianchi_suite(chart, seed=cfg.seed, tols=tols, **kw), {}
    if s == "holonomy":
        return checks.holonomy_suite(chart, tols=tols), {}
    if s == "transport":
        return checks.transport_suite(chart, seed=cfg.seed, tols=tols), {}
    if s == "operators":
        return checks.operators_suite(chart, seed=cfg.seed, tols=tols, **kw), {}
    return checks.rescale_suite(chart, seed=cfg.seed, tols=tols, **kw), {}


def run_einstein(cfg):
    if cfg.n is None or cfg.n < 3:
        raise UsageError("--n must be at least 3")
    return checks.einstein_suite(cfg.chart, cfg.n, seed=cfg.seed, samples=cfg.samples,
                                 tols=cfg.tolerances, h=cfg.flags.get("step", 1e-3)), {}


def run_transform(cfg):
    rows = []
    if cfg.suite in ("laws", "all"):
        rows += checks.rescale_suite(_chart(cfg), seed=cfg.seed, samples=cfg.samples, tols=cfg.tolerances)
    if cfg.suite in ("displays", "all"):
        rows += checks.transform_displays(seed=cfg.seed)
    if cfg.suite in ("cross-layer", "all"):
        rows += checks.cross_layer(seed=cfg.seed, samples=cfg.samples)
    return rows, {}


def run_fixtures(cfg):
    from .fixture_builders import BUILDERS

    rows = []
    for name, build in BUILDERS.items():
        text = dump_json(build())
        path = fixture_path(name)
        if cfg.flags.get("check"):
            same = path.exists() and path.read_text(encoding="utf-8") == text
            rows.append(checks.exact_row("%s matches a fresh build" % name, same, path=str(path)))
            continue
        try:
            write_fixture(name, json.loads(text), force=cfg.force)
            rows.append(checks.exact_row("%s written" % name, True, path=str(path)))
        except FixtureExists as exc:
            rows.append(checks.exact_row("%s not overwritten" % name, False, path=str(path), reason=str(exc)))
    return rows, {"fixture_dir": str(fixture_dir())}


RUNNERS = {
    "cohomology": run_cohomology,
    "normalize": run_normalize,
    "conformal-check": run_conformal,
    "einstein-solve": run_einstein,
    "transform-check": run_transform,
    "fixtures": run_fixtures,
}


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse prints usage itself; --help exits 0
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = _config(args)
        rows, extra = RUNNERS[cfg.subcommand](cfg)
    except UsageError as exc:
        parser.print_usage(stderr)
        stderr.write("tractorlab: error: %s\n" % exc)
        return EXIT_USAGE
    passed = checks.all_passed(rows)
    doc = make_report(cfg.subcommand, cfg.to_json(), rows, passed=passed, **extra)
    try:
        emit_report(doc, cfg.out, stream=stdout)
    except OSError as exc:
        stderr.write("tractorlab: cannot write report: %s\n" % exc)
        return EXIT_FAIL
    if not passed:
        failed = [r["name"] for r in rows if not r["passed"]]
        stderr.write("tractorlab: %d check(s) failed: %s\n" % (len(failed), "; ".join(failed)))
    return EXIT_OK if passed else EXIT_FAIL


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()

"""Command-line front end.

One entry point, six subcommands:

``pn``         emit (or check) the small quantum family of projective space.
``grassmann``  emit the alternate-product structure constants for G(r, n+1),
               compare them against the rim-hook oracle, or emit the pairing.
``gw``         genus-zero degree-d counts for the projective plane.
``mirror``     Jacobian algebra of the torus mirror, wedge spectra, and the
               quantum-vs-Gauss-Manin comparison.
``hm``         run the Hertling-Manin extension on a family + problem file.
``verify``     re-check a family file against the flatness and metric axioms.

Exit codes: 0 on success, 1 when a requested check fails, 2 on usage or
input errors.  Output is deterministic: JSON is emitted with sorted keys,
rationals are rendered as ``num/den`` strings, and q-polynomials as
``[power, coefficient]`` pairs in ascending power order.

Defaults can be placed in an ``altfrob.json`` file in the working directory
(keys ``K``, ``B_max``, ``format``, ``out``, ``verbosity``); command-line
flags override the file.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from .deform import InvariantViolation, gw_pn2, hm_extend, problem_from_json, wdvv_oracle
from .grassmann import alt_metric, alt_structure_constants, rimhook_oracle
from .linalg import charpoly, laurent_ring
from .mirror import compare_quantum_gm, gm_wedge, jacobian_algebra, mirror_brieskorn, mirror_f, mult_f_matrix
from .presaito import check_metric, check_pre_saito, dumps_family, loads_family
from .projective import pn_small_family
from .rings import Laurent, fraction_to_str

CONFIG_NAME = "altfrob.json"
FORMATS = ("json", "csv", "pretty")

DEFAULTS = {
    "K": None,          # truncation order; None means "whatever the data carries"
    "B_max": 8,         # largest box tried when stabilizing a Jacobian quotient
    "format": "json",
    "out": None,        # None means stdout
    "seed": 0,
    "verbosity": 1,
}


class UsageError(Exception):
    """Bad flags or malformed input files; maps to exit code 2."""


class CheckFailed(Exception):
    """A requested verification did not hold; maps to exit code 1."""


# ---------------------------------------------------------------------------
# configuration and output plumbing


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        return {}
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return doc


class Settings:
    """Flag > config file > built-in default, per key."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self._args = args
        self._config = config

    def get(self, key: str, flag_name: str | None = None):
        flag = getattr(self._args, flag_name or key, None)
        if flag is not None:
            return flag
        if key in self._config:
            return self._config[key]
        return DEFAULTS[key]


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _note(settings: Settings, message: str) -> None:
    if settings.get("verbosity") >= 2:
        print(message, file=sys.stderr)


def _dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _q_pairs(x: Laurent) -> list[list]:
    """A one-variable Laurent element as [[power, \"num/den\"], ...], ascending."""
    pairs = []
    for exp, coef in x.sorted_terms():
        power = exp[0] if exp else 0
        pairs.append([power, fraction_to_str(coef)])
    return pairs


def _report_lines(reports) -> tuple[list[str], bool]:
    lines = []
    ok = True
    for rep in reports:
        lines.append(f"== {rep.title} ==")
        lines.extend(rep.lines())
        ok = ok and rep.ok
    return lines, ok


# ---------------------------------------------------------------------------
# subcommands


def cmd_pn(args: argparse.Namespace, settings: Settings) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    fam = pn_small_family(args.n)
    if args.check:
        K = settings.get("K", flag_name="order")
        lines, ok = _report_lines([check_pre_saito(fam, order=K), check_metric(fam, order=K)])
        _emit("\n".join(lines), settings.get("out"))
        return 0 if ok else 1
    _emit(dumps_family(fam), settings.get("out"))
    return 0


def _pretty_table(table) -> str:
    lines = [f"alternate product on G({table.r}, {table.n + 1})"]
    for lam in table.basis():
        for mu in table.basis():
            if mu < lam:
                continue
            prod = table.product(lam, mu)
            if not prod:
                continue
            terms = []
            for nu in sorted(prod):
                terms.append(f"({' '.join(map(str, nu)) or '-'}) * [{str(prod[nu])}]")
            left = f"({' '.join(map(str, lam)) or '-'}) . ({' '.join(map(str, mu)) or '-'})"
            lines.append(f"{left} = {' + '.join(terms)}")
    return "\n".join(lines)


def _associativity_spot_check(table, seed: int, trials: int = 20) -> None:
    rng = random.Random(seed)
    basis = table.basis()
    ring = laurent_ring(("q",))
    for _ in range(trials):
        a, b, c = (rng.choice(basis) for _ in range(3))
        left: dict = {}
        for e, cf in table.product(a, b).items():
            for f, cf2 in table.product(e, c).items():
                left[f] = left.get(f, ring.zero) + cf * cf2
        right: dict = {}
        for e, cf in table.product(b, c).items():
            for f, cf2 in table.product(a, e).items():
                right[f] = right.get(f, ring.zero) + cf * cf2
        keys = set(left) | set(right)
        for f in keys:
            if not (left.get(f, ring.zero) - right.get(f, ring.zero)).is_zero():
                raise CheckFailed(
                    f"associativity fails at {a} . {b} . {c} in component {f}")


def cmd_grassmann(args: argparse.Namespace, settings: Settings) -> int:
    r, n = args.r, args.n
    if not 1 <= r <= n:
        raise UsageError("need 1 <= r <= n")
    _note(settings, f"building alternate product table for r={r}, n={n}")
    table = alt_structure_constants(r, n)

    if args.oracle:
        oracle = rimhook_oracle(r, n)
        if table != oracle:
            raise CheckFailed("alternate table disagrees with the rim-hook oracle")
        _associativity_spot_check(table, settings.get("seed"))
        count = len(table.basis()) * (len(table.basis()) + 1) // 2 - 1
        _emit(f"tables agree ({count} products)", settings.get("out"))
        return 0

    if args.metric:
        _emit(_dumps(alt_metric(r, n).to_json()), settings.get("out"))
        return 0

    fmt = settings.get("format")
    if fmt == "json":
        text = _dumps(table.to_json())
    elif fmt == "csv":
        text = table.to_csv()
    elif fmt == "pretty":
        text = _pretty_table(table)
    else:
        raise UsageError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")
    _emit(text, settings.get("out"))
    return 0


def cmd_gw(args: argparse.Namespace, settings: Settings) -> int:
    if args.dmax < 1:
        raise UsageError("--dmax must be at least 1")
    _note(settings, f"running the big quantum pipeline through degree {args.dmax}")
    counts = gw_pn2(args.dmax)
    oracle = wdvv_oracle(args.dmax)
    if counts != oracle:
        raise CheckFailed(
            f"pipeline counts {counts} disagree with the WDVV recursion {oracle}")
    _emit("N=[" + ",".join(map(str, counts)) + "]", settings.get("out"))
    return 0


def cmd_mirror(args: argparse.Namespace, settings: Settings) -> int:
    n = args.n
    if n < 1:
        raise UsageError("--n must be at least 1")
    box_max = settings.get("B_max", flag_name="b_max")

    if args.compare:
        rs = [args.wedge] if args.wedge is not None else list(range(1, n + 1))
        for r in rs:
            if not 1 <= r <= n:
                raise UsageError("need 1 <= wedge degree <= n")
        reports = [compare_quantum_gm(r, n, box_max=box_max) for r in rs]
        lines, ok = _report_lines(reports)
        _emit("\n".join(lines), settings.get("out"))
        return 0 if ok else 1

    if args.wedge is not None:
        r = args.wedge
        if not 1 <= r <= n:
            raise UsageError("need 1 <= wedge degree <= n")
        point = gm_wedge(mirror_brieskorn(n, box_max=box_max), r)
        coeffs = charpoly(point.R0, laurent_ring(("q",)))
        doc = {
            "n": n,
            "wedge": r,
            "rank": point.rank,
            "labels": list(point.labels),
            "charpoly": [_q_pairs(c) for c in coeffs],
        }
        _emit(_dumps(doc), settings.get("out"))
        return 0

    J = jacobian_algebra(mirror_f(n), box_max=box_max)
    M = mult_f_matrix(J)
    doc = {
        "n": n,
        "dim": J.dim,
        "box": J.box,
        "basis": J.labels(),
        "matrix": [[_q_pairs(M[i, j]) for j in range(J.dim)] for i in range(J.dim)],
    }
    _emit(_dumps(doc), settings.get("out"))
    return 0


def _read_json(path: str, what: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} file {path} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise UsageError(f"{what} file {path} must hold a JSON object")
    return doc


def _read_family(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"family file not found: {path}")
    try:
        return loads_family(p.read_text())
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"could not parse family file {path}: {exc}")


def cmd_hm(args: argparse.Namespace, settings: Settings) -> int:
    initial = _read_family(args.family)
    doc = _read_json(args.psi, "problem")
    K = settings.get("K", flag_name="order")
    if K is not None:
        stored = doc.get("order")
        if stored is not None and K > stored:
            raise UsageError(
                f"--order {K} exceeds the problem data's order {stored}")
        doc = {**doc, "order": K}
    try:
        problem = problem_from_json(initial, doc)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"could not parse problem file {args.psi}: {exc}")
    _note(settings, f"extending through order {problem.order}")
    try:
        extended = hm_extend(problem)
    except InvariantViolation as exc:
        raise CheckFailed(f"extension failed: {exc}")
    _emit(dumps_family(extended), settings.get("out"))
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    fam = _read_family(args.family)
    K = settings.get("K", flag_name="order")
    reports = [check_pre_saito(fam, order=K)]
    if fam.G is not None:
        reports.append(check_metric(fam, order=K))
    lines, ok = _report_lines(reports)
    if fam.G is None:
        lines.append("(family carries no metric; metric axioms skipped)")
    _emit("\n".join(lines), settings.get("out"))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altfrob",
        description="Alternate Frobenius products, torus mirrors, and their checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=CONFIG_NAME, metavar="FILE",
                        help=f"settings file (default ./{CONFIG_NAME})")
    common.add_argument("--format", choices=FORMATS, default=None,
                        help="output format for tables (default json)")
    common.add_argument("--out", default=None, metavar="FILE",
                        help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized spot checks (default 0)")
    common.add_argument("--verbosity", type=int, default=None,
                        help="0 quiet, 1 normal, 2 progress notes on stderr")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pn", parents=[common],
                       help="small quantum family of projective space")
    p.add_argument("--n", type=int, required=True, help="dimension of the target")
    p.add_argument("--check", action="store_true",
                   help="run the flatness and metric checks instead of emitting JSON")
    p.add_argument("--order", type=int, default=None,
                   help="truncation order for the checks")
    p.set_defaults(handler=cmd_pn)

    p = sub.add_parser("grassmann", parents=[common],
                       help="alternate product structure constants for G(r, n+1)")
    p.add_argument("--r", type=int, required=True, help="wedge degree")
    p.add_argument("--n", type=int, required=True,
                   help="projective dimension (the Grassmannian is G(r, n+1))")
    p.add_argument("--oracle", action="store_true",
                   help="compare against the rim-hook oracle instead of emitting the table")
    p.add_argument("--metric", action="store_true",
                   help="emit the induced pairing instead of the table")
    p.set_defaults(handler=cmd_grassmann)

    p = sub.add_parser("gw", parents=[common],
                       help="degree-d rational curve counts in the plane")
    p.add_argument("--dmax", type=int, required=True, help="largest degree to compute")
    p.set_defaults(handler=cmd_gw)

    p = sub.add_parser("mirror", parents=[common],
                       help="Jacobian algebra of the torus mirror and wedge spectra")
    p.add_argument("--n", type=int, required=True, help="dimension of the torus")
    p.add_argument("--wedge", type=int, default=None, metavar="R",
                   help="emit the wedge-power spectrum instead of the algebra")
    p.add_argument("--compare", action="store_true",
                   help="compare against the quantum side (all wedge degrees, "
                        "or just --wedge R when given)")
    p.add_argument("--b-max", type=int, default=None, dest="b_max",
                   help="largest box tried when stabilizing the quotient")
    p.set_defaults(handler=cmd_mirror)

    p = sub.add_parser("hm", parents=[common],
                       help="extend a family by new directions (Hertling-Manin)")
    p.add_argument("--family", required=True, metavar="FILE",
                   help="initial family, as emitted by `pn` or `hm`")
    p.add_argument("--psi", required=True, metavar="FILE",
                   help="deformation problem (new variables, directions, unit row)")
    p.add_argument("--order", type=int, default=None,
                   help="truncation order (default: the problem file's order)")
    p.set_defaults(handler=cmd_hm)

    p = sub.add_parser("verify", parents=[common],
                       help="re-check a family file against the axioms")
    p.add_argument("--family", required=True, metavar="FILE", help="family JSON file")
    p.add_argument("--order", type=int, default=None,
                   help="truncation order for the checks")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        config = _load_config(args.config)
        bad = [k for k in config if k not in DEFAULTS]
        if bad:
            raise UsageError(
                f"unknown config keys in {args.config}: {', '.join(sorted(bad))}")
        settings = Settings(args, config)
        return args.handler(args, settings)
    except UsageError as exc:
        print(f"altfrob: error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"altfrob: check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""``epc`` command line: one subcommand per check, a JSON report on stdout.

Exit codes: 0 when every check passed, 1 when a mathematical check failed,
2 on input or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..algebroid import check_elliptic, gc_criterion
from ..coeff import ModelError
from ..exterior import SpeciesError, top_holomorphic
from ..geomrel import coisotropic_check, poisson_map_check, subalgebroid_check
from ..mcstruct import check_d2, check_mc
from ..spectral import SpectralError, assemble, duality_report, homology_dims, pairing_matrix
from ..spinor import modular_residual, verify_main1
from . import report as R
from .parser import ParseError, parse_expr
from .problem import ProblemError, load_map, load_problem, load_subspace

__all__ = ["build_parser", "run_command", "main"]

Result = Tuple[int, Dict[str, Any]]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="epc", description="Exact checks for extended Poisson structures on flat models.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_):
        return sub.add_parser(name, help=help_, description=help_)

    s = cmd("check-mc", "Maurer-Cartan residuals of H")
    s.add_argument("--input", required=True)
    s.add_argument("--verbose", action="store_true")

    for name, help_ in (("d2", "apply the twisted dbar twice to random elements"), ("verify-main1", "compare tau o dbar_*^H with the Koszul-Brylinski differential")):
        s = cmd(name, help_)
        s.add_argument("--input", required=True)
        s.add_argument("--trials", type=int, default=20)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--max-degree", type=int, default=3)

    for name, help_ in (("gc", "generalized-complex criterion"), ("ellipticity", "pointwise surjectivity of F")):
        s = cmd(name, help_)
        s.add_argument("--input", required=True)
        s.add_argument("--grid", type=int, default=5)

    s = cmd("homology", "homology of a truncated complex on a torus")
    s.add_argument("--input", required=True)
    s.add_argument("--complex", choices=("kb", "lp"), required=True)
    s.add_argument("--cutoff", type=int, required=True)

    s = cmd("pairing", "duality pairing on Koszul-Brylinski homology")
    s.add_argument("--input", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--cutoff", type=int, required=True)

    s = cmd("duality", "duality table for a torus structure")
    s.add_argument("--input", required=True)
    s.add_argument("--cutoff", type=int, required=True)

    s = cmd("modular", "modular residual of an (n,0)-form")
    s.add_argument("--input", required=True)
    s.add_argument("--form", nargs="+", required=True, metavar="EXPR", help="coefficient of dz_1^...^dz_n")
    s.add_argument("--nowhere-vanishing", action="store_true", help="assert that a nonconstant coefficient never vanishes")

    s = cmd("coisotropic", "coisotropy and subalgebroid test for a linear submanifold")
    s.add_argument("--input", required=True)
    s.add_argument("--subspace", required=True)

    s = cmd("poisson-map", "extended Poisson map test for a linear map source -> target")
    s.add_argument("--source", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--matrix", required=True)
    return p


def _positive(name: str, v: int, allow_zero: bool = False) -> None:
    if v < 0 or (v == 0 and not allow_zero):
        raise _UsageError(f"epc: error: --{name} must be {'nonnegative' if allow_zero else 'positive'}")


def _check_mc(a) -> Result:
    H = load_problem(a.input).H
    rep = check_mc(H)
    body = {
        "mc": {
            "is_mc": rep.is_zero,
            "consistent": rep.consistent,
            "residuals": {k: R.element(v) for k, v in rep.components().items()},
        }
    }
    if a.verbose:
        body["mc"]["H"] = {"pi": R.element(H.pi), "theta": R.element(H.theta), "omega": R.element(H.omega)}
    return (0 if rep.is_zero else 1), body


def _sampled(a, fn, key) -> Result:
    _positive("trials", a.trials)
    _positive("max-degree", a.max_degree, allow_zero=True)
    H = load_problem(a.input).H
    rep = fn(H, a.max_degree, a.trials, a.seed) if key == "d2" else fn(H, a.trials, a.seed, a.max_degree)
    body = {
        key: {
            "max_residual": R.fraction(rep.max_residual),
            "per_degree": {str(k): R.fraction(v) for k, v in sorted(rep.per_degree.items())},
            "mc": rep.mc_ok,
            "trials": a.trials,
            "seed": a.seed,
            "max_degree": rep.max_degree,
        }
    }
    if not rep.mc_ok:
        body[key]["warning"] = "H does not satisfy the Maurer-Cartan equation"
    return (0 if rep.is_zero and rep.mc_ok else 1), body


def _gc(a) -> Result:
    _positive("grid", a.grid)
    H = load_problem(a.input).H
    rep = gc_criterion(H, G=a.grid)
    comp = [[R.coeff(e) for e in row] for row in rep.composite.entries]
    dets = [
        {"point": R.point(p), "det": R.scalar(d) if rep.exact else R.number(d)} for p, d in rep.determinants
    ]
    body = {
        "gc": {
            "exact": rep.exact,
            "composite": comp,
            "identity_multiple": None if rep.identity_factor is None else R.coeff(rep.identity_factor),
            "determinants": dets,
            "verdict": rep.verdict,
        }
    }
    return (0 if rep.verdict else 1), body


def _ellipticity(a) -> Result:
    _positive("grid", a.grid)
    H = load_problem(a.input).H
    rep = check_elliptic(H, G=a.grid)
    pts = [{"point": R.point(p["point"]), "rank": p["rank"], "elliptic": p["elliptic"]} for p in rep.points]
    body = {
        "elliptic": {
            "exact": rep.exact,
            "points": pts,
            "degenerate_count": len(rep.degenerate),
            "verdict": rep.verdict,
            "note": rep.note,
        }
    }
    return (0 if rep.verdict else 1), body


def _homology(a) -> Result:
    _positive("cutoff", a.cutoff, allow_zero=True)
    H = load_problem(a.input).H
    C = assemble(H, a.complex, a.cutoff)
    rep = homology_dims(C, heuristic=not C.mode_diagonal)
    body = {
        "homology": {
            "complex": a.complex,
            "cutoff": a.cutoff,
            "space_dims": C.dims(),
            "ranks": rep.ranks,
            "dims": rep.dims,
            "exact": rep.exact,
        }
    }
    if not rep.exact:
        body["homology"].update({"stabilized": rep.stabilized, "dims_next": rep.dims_next})
    ok = rep.exact or bool(rep.stabilized)
    return (0 if ok else 1), body


def _pairing(a) -> Result:
    _positive("cutoff", a.cutoff, allow_zero=True)
    H = load_problem(a.input).H
    rep = pairing_matrix(H, a.degree, a.cutoff)
    body = {
        "pairing": {
            "degree": a.degree,
            "cutoff": a.cutoff,
            "rank": rep.rank,
            "dim": rep.dim,
            "dual_dim": rep.dual_dim,
            "matrix": [[R.scalar(c) for c in row] for row in rep.matrix],
            "nondegenerate": rep.nondegenerate,
        }
    }
    return (0 if rep.nondegenerate else 1), body


def _duality(a) -> Result:
    _positive("cutoff", a.cutoff, allow_zero=True)
    H = load_problem(a.input).H
    rep = duality_report(H, a.cutoff)
    rows = [{"check": r.check, "degree": r.degree, "lhs": r.lhs, "rhs": r.rhs, "status": r.status} for r in rep.rows]
    body = {
        "duality": {
            "cutoff": a.cutoff,
            "kb_dims": rep.kb_dims,
            "lp_dims": rep.lp_dims,
            "pairing_ranks": rep.pairing_ranks,
            "unimodular": rep.unimodular,
            "elliptic": rep.elliptic,
            "rows": rows,
        }
    }
    return (0 if rep.passed else 1), body


def _modular(a) -> Result:
    spec = load_problem(a.input)
    H = spec.H
    text = " ".join(a.form)
    try:
        c = parse_expr(text, spec.model)
    except (ParseError, ModelError) as exc:
        raise ProblemError(f"--form: {exc}") from None
    omega0 = top_holomorphic(spec.model, c)
    res = modular_residual(H, omega0, nowhere_vanishing=a.nowhere_vanishing or None)
    body = {"modular": {"form": R.element(omega0), "residual": R.element(res), "unimodular": res.is_zero()}}
    return (0 if res.is_zero() else 1), body


def _coisotropic(a) -> Result:
    spec = load_problem(a.input)
    H = spec.H
    Y = load_subspace(a.subspace, spec.model)
    rep = coisotropic_check(H, Y)
    sub = subalgebroid_check(H, Y)
    body = {
        "coisotropic": {
            "verdict": rep.verdict,
            "residuals": [{"u": i, "v": j, "value": R.coeff(r)} for i, j, r in rep.nonzero()],
            "pairs_checked": len(rep.residuals),
            "subalgebroid": {
                "precondition": sub.precondition,
                "anchor_ok": sub.anchor_ok,
                "bracket_ok": sub.bracket_ok,
                "failures": sub.failures,
                "verdict": sub.verdict,
            },
        }
    }
    return (0 if rep.verdict and sub.verdict else 1), body


def _poisson_map(a) -> Result:
    src = load_problem(a.source)
    tgt = load_problem(a.target)
    f = load_map(a.matrix, src.model, tgt.model)
    rep = poisson_map_check(tgt.H, src.H, f)
    body = {
        "poisson_map": {
            "verdict": rep.verdict,
            "graph_coisotropic": rep.graph_verdict,
            "consistent": rep.consistent,
            "pi_residual": [[f"d/dz{i + 1}^d/dz{j + 1}", R.coeff(c)] for (i, j), c in sorted(rep.pi_residual.items())],
            "omega_residual": R.element(rep.omega_residual),
            "theta_residual": [[R.coeff(e) for e in row] for row in rep.theta_residual],
        }
    }
    return (0 if rep.verdict and rep.consistent else 1), body


_COMMANDS = {
    "check-mc": _check_mc,
    "d2": lambda a: _sampled(a, check_d2, "d2"),
    "verify-main1": lambda a: _sampled(a, verify_main1, "main1"),
    "gc": _gc,
    "ellipticity": _ellipticity,
    "homology": _homology,
    "pairing": _pairing,
    "duality": _duality,
    "modular": _modular,
    "coisotropic": _coisotropic,
    "poisson-map": _poisson_map,
}


def run_command(argv: Sequence[str]) -> Tuple[int, Optional[Dict[str, Any]], str]:
    """Run one invocation; returns ``(exit code, report or None, message for stderr)``."""
    try:
        args = build_parser().parse_args(list(argv))
        code, body = _COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0), None, ""
    except _UsageError as exc:
        return 2, None, str(exc)
    except (ProblemError, ParseError, ModelError, SpeciesError, SpectralError, ValueError) as exc:
        return 2, None, f"epc: error: {exc}"
    return code, R.document(args.command, body), ""


def main(argv: Optional[List[str]] = None) -> int:
    code, doc, msg = run_command(sys.argv[1:] if argv is None else argv)
    if doc is not None:
        sys.stdout.write(R.dumps(doc))
    if msg:
        sys.stderr.write(msg if msg.endswith("\n") else msg + "\n")
    return code


if __name__ == "__main__":
    raise SystemExit(main())

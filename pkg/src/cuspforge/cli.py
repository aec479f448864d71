"""Command-line front end: every subcommand prints one deterministic JSON report."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction

import mpmath as mp

from . import __version__
from .analytic.params import Estimate, TruncationParams
from .cuspidal import (
    LABELINGS,
    AbelianStructure,
    cuspidal_group_full,
    cuspidal_group_minus,
    cuspidal_group_plus,
    fermat_labels,
    parse_divisor,
    theta_image,
)
from .dessin import Cusp, Dessin, DessinError, fermat_coords, from_fermat, genus, load, trivial
from .eisenstein import (
    MODES,
    assemble_full_cycle,
    boundary_check,
    cycle_boundary,
    fermat_cycle,
    fermat_cycle_ac,
    fermat_cycle_bb,
    full_boundary,
    loop_rows,
    manin_drinfeld_check,
    torsion_order,
    verify_with_oracle,
)
from .homology import CuspDivisor, manin_presentation
from .linalg import in_rowspace

EXIT_OK, EXIT_FAIL, EXIT_DESSIN, EXIT_IO, EXIT_CUSPIDAL, EXIT_ORACLE = 0, 1, 2, 3, 4, 5

CONVENTIONS = {
    "action": "right action of Gamma(2) on cosets; piA = A = (1 2; 0 1), piB = B = (1 0; 2 1)",
    "boundary": "boundary of the real part of E_D is -D",
    "cusp_labels": "kind:rep with kind in zero/one/inf and rep the smallest coset index of the orbit",
    "intersection": "xi+(g) . xi-(h) = delta(g, h)",
    "lambda": "lambda(z) = 16 q - 128 q^2 + ... evaluated at z + 1, q = exp(pi i z); lambda(i) = -1",
}

KIND_NAMES = {"zero": "zero", "one": "one", "inf": "infinity"}


class CliError(Exception):
    def __init__(self, code: int, message: str, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report or {}


@dataclass
class RunConfig:
    subcommand: str
    dessin_path: str | None = None
    fermat_n: int | None = None
    trivial: bool = False
    divisors: list[str] = field(default_factory=list)
    mode: str = "calibrated"
    labeling: str = "combinatorial"
    params: TruncationParams = field(default_factory=TruncationParams)
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        sources = sum([self.dessin_path is not None, self.fermat_n is not None, self.trivial])
        if sources > 1:
            raise ValueError("give exactly one of --dessin, --fermat, --trivial")

    def dessin(self) -> Dessin:
        if self.dessin_path is not None:
            try:
                return load(self.dessin_path)
            except OSError as exc:
                raise CliError(EXIT_IO, f"cannot read {self.dessin_path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise CliError(EXIT_DESSIN, "invalid dessin", {"violations": [f"not JSON: {exc}"]}) from exc
        if self.fermat_n is not None:
            return from_fermat(self.fermat_n)
        if self.trivial:
            return trivial()
        raise CliError(EXIT_FAIL, "no input: give --dessin, --fermat or --trivial")


# -- JSON ------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Estimate):
        return x.to_json()
    if isinstance(x, mp.mpc):
        return [mp.nstr(x.real, 15), mp.nstr(x.imag, 15)]
    if isinstance(x, mp.mpf):
        return mp.nstr(x, 15)
    if isinstance(x, Cusp):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


def render(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


def _structure(s: AbelianStructure) -> dict:
    return {**s.to_json(), "elementary_divisors": list(s.elementary_divisors), "order": s.order, "text": str(s)}


def _divisor_json(div: CuspDivisor) -> dict:
    return {str(c): str(Fraction(v)) for c, v in sorted(div.coeffs.items(), key=lambda t: (t[0].kind, t[0].rep)) if v}


# -- commands --------------------------------------------------------------------

def cmd_analyze(cfg: RunConfig) -> tuple[dict, int]:
    d = cfg.dessin()
    table = d.cusp_table
    cusps = {
        KIND_NAMES[k]: [{"cusp": str(ci.cusp), "width": ci.width} for ci in table.by_kind[k]] for k in ("zero", "one", "inf")
    }
    report = {
        "n": d.n,
        "name": d.name,
        "genus": genus(d),
        "cusps": {k: len(v) for k, v in cusps.items()},
        "cusp_list": cusps,
        "validation": [],
    }
    return report, EXIT_OK


def fermat_geometry(n: int) -> dict:
    """Index, cusp counts, widths, genus and the coset <-> (zero cusp, inf cusp) bijection."""
    d = from_fermat(n)
    t = d.cusp_table
    pairs = {(d.cusp_at(g, "zero"), d.cusp_at(g, "inf")) for g in range(d.n)}
    checks = {
        "index": d.n == n * n,
        "cusps_per_kind": all(len(t.by_kind[k]) == n for k in t.by_kind),
        "widths": all(ci.width == n for k in t.by_kind for ci in t.by_kind[k]),
        "genus": genus(d) == (n - 1) * (n - 2) // 2,
        "coset_bijection": len(pairs) == d.n,
    }
    return {"index": d.n, "genus": genus(d), "cusps": {KIND_NAMES[k]: len(v) for k, v in t.by_kind.items()}, "checks": checks}


def cmd_fermat_report(cfg: RunConfig) -> tuple[dict, int]:
    n = _need_fermat(cfg)
    geo = fermat_geometry(n)
    labels = fermat_labels(n, cfg.labeling)
    report = {
        "N": n,
        "labeling": cfg.labeling,
        "geometry": geo,
        "labels": {f"{letter}{j}": str(c) for (letter, j), c in sorted(labels.items())},
        "cosets": {str(g): list(fermat_coords(n, g)) for g in range(n * n)},
    }
    ok = all(geo["checks"].values())
    if n % 2 and n >= 3:
        report["cuspidal"] = {
            "full": _structure(cuspidal_group_full(n, cfg.labeling)),
            "minus": _structure(cuspidal_group_minus(n, cfg.labeling)),
            "plus": _structure(cuspidal_group_plus(n)),
        }
        report["theta_image"] = {side: _structure(theta_image(n, side)) for side in ("plus", "minus")}
    report["status"] = "PASS" if ok else "FAIL"
    return report, EXIT_OK if ok else EXIT_FAIL


def predicted_structure(n: int, jacobian: str) -> tuple[int, ...]:
    if jacobian == "full":
        return (n,) * (3 * n - 7)
    if jacobian == "minus":
        return (n,) * (2 * n - 2)
    return (2 * n,) * (n - 1)


def cmd_cuspidal(cfg: RunConfig) -> tuple[dict, int]:
    n = _need_fermat(cfg)
    jac = cfg.extra.get("jacobian", "full")
    if jac == "full":
        s = cuspidal_group_full(n, cfg.labeling)
    elif jac == "minus":
        s = cuspidal_group_minus(n, cfg.labeling)
    else:
        s = cuspidal_group_plus(n)
    pred = predicted_structure(n, jac)
    ok = s.free_rank == 0 and s.invariant_factors == pred
    report = {
        "N": n,
        "jacobian": jac,
        "structure": _structure(s),
        "predicted": {"invariant_factors": list(pred), "text": str(AbelianStructure(0, pred))},
        "status": "PASS" if ok else "FAIL",
    }
    return report, EXIT_OK if ok else EXIT_CUSPIDAL


def _basis_pair(n: int, div: CuspDivisor, labeling: str):
    """('ac', j, k) for (a_j) - (c_k), ('bb', j, k) for (b_j) - (b_k), else None."""
    where = {c: key for key, c in fermat_labels(n, labeling).items()}
    pos = [where[c] for c, v in div.coeffs.items() if v == 1]
    neg = [where[c] for c, v in div.coeffs.items() if v == -1]
    if len(pos) != 1 or len(neg) != 1 or len(div.coeffs) != 2:
        return None
    (lp, j), (ln, k) = pos[0], neg[0]
    if (lp, ln) == ("a", "c"):
        return "ac", j, k
    if (lp, ln) == ("b", "b"):
        return "bb", j, k
    return None


def cmd_eisenstein(cfg: RunConfig) -> tuple[dict, int]:
    n = _need_fermat(cfg)
    d = from_fermat(n)
    if len(cfg.divisors) != 1:
        raise CliError(EXIT_FAIL, "give exactly one --divisor")
    div = _parse(cfg.divisors[0], d, n, cfg.labeling)
    notes = []
    if cfg.mode == "calibrated":
        cycle = fermat_cycle(n, div)
    else:
        pair = _basis_pair(n, div, cfg.labeling)
        if pair is None:
            raise CliError(EXIT_FAIL, "paper_literal cycles exist only for (a_j) - (c_k) and (b_j) - (b_k)")
        make = fermat_cycle_ac if pair[0] == "ac" else fermat_cycle_bb
        cycle = make(n, pair[1], pair[2], cfg.mode, cfg.labeling)
    check = boundary_check(d, cycle)
    report = {
        "N": n,
        "divisor": _divisor_json(div),
        "mode": cfg.mode,
        "side": cycle.side,
        "coeffs": {str(g): str(Fraction(v)) for g, v in sorted(cycle.real_part.coeffs.items())},
        "boundary": _divisor_json(cycle_boundary(d, cycle)),
        "boundary_check": check,
        "imag_norm": float(max((abs(Fraction(v)) for v in cycle.imag_part.coeffs.values()), default=0)),
        "torsion": torsion_order(cycle, d.n).to_json(),
    }
    if cfg.mode == "paper_literal":
        calibrated = fermat_cycle(n, div)
        diff = [Fraction(x) - Fraction(y) for x, y in zip(cycle.real_part.to_list(d.n), calibrated.real_part.to_list(d.n))]
        agrees = in_rowspace(diff, loop_rows(d, cycle.side))
        report["agrees_with_calibrated_modulo_loops"] = agrees
        if check != "-D":
            notes.append("the 1/N indicator ansatz does not have boundary -D; see 'boundary' for what it closes up to")
    code = EXIT_OK
    if cfg.extra.get("oracle"):
        rows = verify_with_oracle(n, cycle, cfg.params, cfg.extra.get("den_bound", 18), cfg.extra.get("tol", 1e-6))
        report["oracle"] = [
            {"coset": r["coset"], "numeric": r["numeric"], "recognized": r["recognized"].to_json(), "exact": r["exact"], "ok": r["ok"]}
            for r in rows
        ]
        report["params"] = cfg.params.to_json()
        if cfg.mode == "calibrated" and not all(r["ok"] for r in rows):
            code = EXIT_ORACLE
    if notes:
        report["notes"] = notes
    return report, code


def cmd_manin(cfg: RunConfig) -> tuple[dict, int]:
    d = cfg.dessin()
    p = manin_presentation(d)
    c = len(d.cusp_table.all_cusps())
    expected = 2 * genus(d) + c - 1
    ok = p.rank == expected
    report = {
        "n": d.n,
        "symbols": p.size,
        "relation_rank": p.relation_rank,
        "rank": p.rank,
        "expected_rank": expected,
        "status": "PASS" if ok else "FAIL",
    }
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_md_check(cfg: RunConfig) -> tuple[dict, int]:
    den = cfg.extra.get("den_bound", 10**6)
    tol = cfg.extra.get("tol", 1e-6)
    results = []
    if cfg.extra.get("values"):
        d = cfg.dessin()
        p = manin_presentation(d)
        try:
            with open(cfg.extra["values"]) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read {cfg.extra['values']}: {exc}") from exc
        vals = data["values"]
        if len(vals) != p.size:
            raise CliError(EXIT_FAIL, f"expected {p.size} values, got {len(vals)}")
        exact = "errors" not in data and all(isinstance(x, (int, str)) for x in vals)
        if not exact:
            # floats are measurements: default to a double-precision error bar
            errs = data.get("errors") or [1e-12 * max(1.0, abs(float(x))) for x in vals]
            with mp.workprec(cfg.params.precision):
                v = manin_drinfeld_check(p, [mp.mpf(x) for x in vals], [mp.mpf(e) for e in errs], den, tol)
        else:
            v = manin_drinfeld_check(p, [Fraction(x) for x in vals], None, den, tol)
        results.append({"input": cfg.extra["values"], "verdict": v.to_json()})
    else:
        n = _need_fermat(cfg)
        d = from_fermat(n)
        p = manin_presentation(d)
        for text in cfg.divisors:
            div = _parse(text, d, n, cfg.labeling)
            vec = assemble_full_cycle(d, div)
            v = manin_drinfeld_check(p, vec, None, den, tol)
            results.append({
                "divisor": _divisor_json(div),
                "boundary": _divisor_json(full_boundary(p, vec)),
                "verdict": v.to_json(),
            })
    ok = all(r["verdict"]["is_torsion"] for r in results)
    return {"results": results, "den_bound": den, "tol": tol, "status": "PASS" if ok else "FAIL"}, EXIT_OK if ok else EXIT_FAIL


def cmd_numeric(cfg: RunConfig) -> tuple[dict, int]:
    from .analytic import oracle_F, phi_truncated, scattering_difference, scholl_coefficient, sD_estimate

    what = cfg.extra.get("estimator", "phi")
    prm = cfg.params
    d = cfg.dessin() if (cfg.dessin_path or cfg.fermat_n or cfg.trivial) else trivial()
    report: dict = {"estimator": what, "params": prm.to_json(), "dessin": d.name}

    def cusp(key, default):
        text = cfg.extra.get(key)
        return Cusp.parse(text) if text else default

    def divisor():
        if not cfg.divisors:
            raise CliError(EXIT_FAIL, f"{what} needs --divisor")
        return _parse(cfg.divisors[0], d, cfg.fermat_n, cfg.labeling)

    inf0, zero0, one0 = d.cusp_at(0, "inf"), d.cusp_at(0, "zero"), d.cusp_at(0, "one")
    with mp.workprec(prm.precision):
        if what == "phi":
            j, k = cusp("j", inf0), cusp("k", inf0)
            est = phi_truncated(d, j, k, cfg.extra.get("r", 1), prm.s, prm.c_max)
            report.update(j=str(j), k=str(k), r=cfg.extra.get("r", 1), result=est)
        elif what == "sD":
            div = divisor()
            x = cfg.extra.get("x")
            report.update(divisor=_divisor_json(div), x=x, result=sD_estimate(d, div, None if x is None else Fraction(x), prm))
        elif what == "sD-sweep":
            div = divisor()
            x = cfg.extra.get("x")
            rows = []
            for eps in (1e-2, 1e-3, 1e-4):
                rows.append({"eps": eps, "result": sD_estimate(d, div, None if x is None else Fraction(x), prm.refined(eps=eps))})
            report.update(divisor=_divisor_json(div), x=x, rows=rows)
        elif what == "scholl":
            div = divisor()
            r = cfg.extra.get("r", 1)
            report.update(divisor=_divisor_json(div), r=r, result=scholl_coefficient(d, div, r, prm))
        elif what == "scattering":
            j, k1, k2 = cusp("j", inf0), cusp("k", zero0), cusp("k2", one0)
            report.update(j=str(j), k1=str(k1), k2=str(k2), result=scattering_difference(d, j, k1, k2, prm))
        elif what == "contour":
            n = _need_fermat(cfg)
            div = divisor()
            side = "minus" if any(c.kind == "one" for c in div.coeffs) else "plus"
            rows = []
            for g in range(d.n):
                rows.append({"coset": g, "F": oracle_F(n, d, div, d.coset_reps[g], side, prm)})
            report.update(divisor=_divisor_json(div), side=side, rows=rows)
        else:
            raise CliError(EXIT_FAIL, f"unknown estimator {what}")
    return report, EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "fermat-report": cmd_fermat_report,
    "cuspidal": cmd_cuspidal,
    "eisenstein": cmd_eisenstein,
    "manin": cmd_manin,
    "md-check": cmd_md_check,
    "numeric": cmd_numeric,
}


def _need_fermat(cfg: RunConfig) -> int:
    if cfg.fermat_n is None:
        raise CliError(EXIT_FAIL, f"{cfg.subcommand} needs --N/--fermat")
    return cfg.fermat_n


def _parse(text: str, d: Dessin, n: int | None, labeling: str) -> CuspDivisor:
    try:
        return parse_divisor(text, d, n, labeling)
    except ValueError as exc:
        raise CliError(EXIT_FAIL, f"bad divisor {text!r}: {exc}") from exc


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cuspforge", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, dessin=True):
        if dessin:
            p.add_argument("--dessin", dest="dessin_path", help="dessin JSON file with n, piA, piB")
            p.add_argument("--trivial", action="store_true", help="use Gamma(2) itself")
        p.add_argument("--N", "--fermat", dest="fermat_n", type=int, help="Fermat level N")
        p.add_argument("--labeling", choices=LABELINGS, default="combinatorial")
        p.add_argument("--out", help="write the report here instead of stdout")
        tp = TruncationParams.__dataclass_fields__
        p.add_argument("--cmax", type=int, default=tp["c_max"].default)
        p.add_argument("--rmax", type=int, default=tp["r_max"].default)
        p.add_argument("--s", type=float, default=tp["s"].default)
        p.add_argument("--eps", type=float, default=tp["eps"].default)
        p.add_argument("--steps", type=int, default=tp["quad_steps"].default)
        p.add_argument("--bits", type=int, default=0, help="working precision (default: CUSPFORGE_BITS or 256)")

    common(sub.add_parser("analyze", help="index, cusps, widths, genus"))
    common(sub.add_parser("fermat-report", help="geometry, labels and cuspidal groups of the Fermat dessin"), dessin=False)
    p = sub.add_parser("cuspidal", help="cuspidal group structure against the closed form")
    common(p, dessin=False)
    p.add_argument("--jacobian", choices=("full", "plus", "minus"), default="full")
    p = sub.add_parser("eisenstein", help="exact Eisenstein cycle with checks")
    common(p, dessin=False)
    p.add_argument("--divisor", action="append", default=[])
    p.add_argument("--mode", choices=MODES, default="calibrated")
    p.add_argument("--oracle", action="store_true", help="compare with numeric periods")
    p.add_argument("--den-bound", type=int, default=18)
    p.add_argument("--tol", type=float, default=1e-6)
    common(sub.add_parser("manin", help="Manin presentation rank"))
    p = sub.add_parser("md-check", help="torsion test for full-curve cycles")
    common(p)
    p.add_argument("--divisor", action="append", default=[])
    p.add_argument("--values", help="JSON file with 'values' (and optional 'errors') over the Manin symbols")
    p.add_argument("--den-bound", type=int, default=10**6)
    p.add_argument("--tol", type=float, default=1e-6)
    p = sub.add_parser("numeric", help="analytic estimators")
    common(p)
    p.add_argument("--estimator", choices=("phi", "sD", "sD-sweep", "scholl", "scattering", "contour"), default="phi")
    p.add_argument("--divisor", action="append", default=[])
    p.add_argument("--j")
    p.add_argument("--k")
    p.add_argument("--k2")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--x", help="rational evaluation point (omit for infinity)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = TruncationParams(
        c_max=ns.cmax, r_max=ns.rmax, s=ns.s, eps=ns.eps, quad_steps=ns.steps, precision=ns.bits
    )
    known = {f.name for f in fields(RunConfig)}
    extra = {k: v for k, v in vars(ns).items() if k not in known and k not in ("cmax", "rmax", "s", "eps", "steps", "bits", "divisor")}
    return RunConfig(
        subcommand=ns.subcommand,
        dessin_path=getattr(ns, "dessin_path", None),
        fermat_n=ns.fermat_n,
        trivial=getattr(ns, "trivial", False),
        divisors=list(getattr(ns, "divisor", []) or []),
        mode=getattr(ns, "mode", "calibrated"),
        labeling=ns.labeling,
        params=params,
        out=ns.out,
        extra=extra,
    )


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Run one command; failures become a report with an error field and the matching exit code."""
    try:
        report, code = COMMANDS[cfg.subcommand](cfg)
    except CliError as exc:
        report, code = {**exc.report, "error": str(exc)}, exc.code
    except DessinError as exc:
        report, code = {"error": "invalid dessin", "violations": exc.violations}, EXIT_DESSIN
    except ValueError as exc:
        report, code = {"error": str(exc)}, EXIT_FAIL
    report["command"] = cfg.subcommand
    report["conventions"] = CONVENTIONS
    report["exit_code"] = code
    return report, code


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        sys.stderr.write(f"cuspforge: {exc}\n")
        return EXIT_FAIL
    report, code = run(cfg)
    text = render(report)
    if cfg.out:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"cuspforge: cannot write {cfg.out}: {exc}\n")
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

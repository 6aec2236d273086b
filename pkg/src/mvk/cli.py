"""``mvk``: command line front end over scenario files."""
from __future__ import annotations

import argparse
import json
import sys

from . import scenario as sc
from .birational import bir_of
from .equivariant import check_commute, forget_action, restrict_action, vol_equivariant
from .errors import BudgetError, InvariantViolation, ValidationError
from .ring import Reduction, reduce
from .toric import euler_number, face_lattice, p_class_from_cone
from .volume import obstruct_rational, obstruct_stable, parity_rule, vol, vol_bir, vol_sb

EXIT_OK, EXIT_MISMATCH, EXIT_VALIDATION, EXIT_BUDGET = 0, 1, 2, 3


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2)


class Report:
    def __init__(self, text: str, data):
        self.text, self.data = text, data


def _need_complex(s: sc.Scenario):
    if s.complex is None:
        raise ValidationError(f"scenario {s.name} has no strata complex")
    return s.complex


def cmd_validate(s, args):
    if s.cone is not None:
        fl = face_lattice(s.cone)
        return Report(f"valid cone: dim {s.cone.dim}, {len(s.cone.rays)} rays",
                      {"valid": True, "cone": s.cone.to_json(), "faces": len(fl.faces)})
    x = _need_complex(s)
    codims = sorted(t.codim for t in x)
    return Report(f"valid: {len(x)} strata, fiber dimension {x.fiber_dim}",
                  {"valid": True, "fiber_dim": x.fiber_dim, "strata": len(x), "codims": codims,
                   "complex": x.to_json(), "labels": x.store.to_json()})


def cmd_vol(s, args):
    x = _need_complex(s)
    e = x.fiber_dim if args.grade is None else args.grade
    v = vol(x, e)
    return Report(v.render(), {"grade": e, "class": v.render(), "terms": v.to_json()})


def cmd_vol_bir(s, args):
    b = vol_bir(_need_complex(s))
    return Report(b.render(), {"class": b.render(), "terms": b.to_json()})


def cmd_vol_sb(s, args):
    b = vol_sb(_need_complex(s))
    return Report(b.render(), {"class": b.render(), "terms": b.to_json()})


def cmd_obstruct(s, args):
    x = _need_complex(s)
    if args.rational or args.literal_point_target:
        v = obstruct_rational(x, args.budget, literal_point=args.literal_point_target)
    elif args.parity:
        v = parity_rule(x)
    else:
        v = obstruct_stable(x, args.budget)
    return Report(v.render(), v.to_json())


def cmd_reduce(s, args):
    x = _need_complex(s)
    e = x.fiber_dim if args.grade is None else args.grade
    r = reduce(vol(x, e), Reduction(args.mod))
    return Report(r.render(), {"mod": args.mod, "grade": e, "class": r.render(),
                               "terms": r.to_json()})


def cmd_faces(s, args):
    if s.cone is None:
        raise ValidationError(f"scenario {s.name} has no cone")
    fl = face_lattice(s.cone)
    counts = fl.counts_by_dim()
    data = {**fl.to_json(), "euler_number": euler_number(fl)}
    lines = [f"faces by dimension: {counts}", f"euler number: {data['euler_number']}"]
    if s.cone.dim:
        p = p_class_from_cone(s.cone, s.cone.dim - 1)
        data["p_class"] = p.render()
        lines.append(f"P: {p.render()}")
    return Report("\n".join(lines), data)


def cmd_equivariant(s, args):
    if s.model is None:
        raise ValidationError(f"scenario {s.name} has no equivariant model")
    v = vol_equivariant(s.model, args.grade)
    if args.check_commute:
        if s.base_changed is None:
            raise ValidationError("scenario declares no base_changed complex")
        ok, diag = check_commute(s.model, s.base_changed,
                                 s.raw["equivariant"].get("identification", {}))
        text = "commutes" if ok else f"does not commute at {diag['monomial']}"
        return Report(text, {"commutes": ok, "diagnostic": diag})
    if args.forget:
        v = forget_action(v)
    elif args.restrict is not None:
        v = restrict_action(v, args.restrict)
    return Report(v.render(), {"class": v.render(), "terms": v.to_json(),
                               "lcm": s.model.n})


def scenario_report(s: sc.Scenario, budget: int = 12) -> dict:
    """Everything the corpus run records for one scenario."""
    x = _need_complex(s)
    v = vol(x)
    out = {
        "name": s.name,
        "fiber_dim": x.fiber_dim,
        "strata": len(x),
        "vol": v.render(),
        "vol_bir": vol_bir(x).render(),
        "vol_sb": vol_sb(x).render(),
        "verdicts": {
            "stable": obstruct_stable(x, budget).to_json(),
            "rational": obstruct_rational(x, budget).to_json(),
            "parity": parity_rule(x).to_json(),
        },
    }
    # the two routes to the birational volume must agree
    via_ring = bir_of(reduce(v, Reduction.MOD_TAU), x.fiber_dim, x.atom_labels()) \
        .map(x.store.bir_image)
    out["reductions_commute"] = via_ring == vol_bir(x)
    return out


def _expected_ok(s: sc.Scenario, report: dict) -> bool:
    exp = s.expected
    if not exp:
        return True
    got = report["verdicts"][exp["rule"]]
    return got["status"] == exp["status"] and got["class"] == exp.get("class", got["class"])


def cmd_corpus(args):
    d = sc.corpus_dir()
    golden_dir = d / "golden"
    results, reports = [], []
    for entry in sc.corpus_manifest():
        s = sc.load(d / entry["file"])
        rep = scenario_report(s, args.budget)
        gfile = golden_dir / (entry["file"].rsplit(".", 1)[0] + ".golden.json")
        if args.write_golden:
            golden_dir.mkdir(exist_ok=True)
            gfile.write_text(dumps(rep) + "\n", encoding="utf-8")
        golden = json.loads(gfile.read_text(encoding="utf-8")) if gfile.exists() else None
        ok = golden == rep and _expected_ok(s, rep) and rep["reductions_commute"]
        results.append({"file": entry["file"], "match": ok,
                        "status": rep["verdicts"][s.expected["rule"]]["status"]
                        if s.expected else None})
        reports.append(rep)
    matched = sum(r["match"] for r in results)
    lines = [f"{'ok  ' if r['match'] else 'FAIL'} {r['file']}: {r['status']}" for r in results]
    lines.append(f"{matched}/{len(results)} scenarios match golden files")
    rep = Report("\n".join(lines), {"matched": matched, "total": len(results),
                                    "results": results, "reports": reports})
    return rep, matched == len(results)


COMMANDS = {
    "validate": cmd_validate,
    "vol": cmd_vol,
    "vol-bir": cmd_vol_bir,
    "vol-sb": cmd_vol_sb,
    "obstruct": cmd_obstruct,
    "reduce": cmd_reduce,
    "faces": cmd_faces,
    "equivariant": cmd_equivariant,
}


def build_parser() -> argparse.ArgumentParser:
    def globals_(default):
        # subcommands must not overwrite a value given before the command name
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--json", action="store_true",
                       default=False if default else argparse.SUPPRESS,
                       help="machine-readable output")
        g.add_argument("--budget", type=int, default=12 if default else argparse.SUPPRESS,
                       help="label cap for the merge search (default 12)")
        return g

    common = globals_(False)
    p = argparse.ArgumentParser(prog="mvk", parents=[globals_(True)],
                                description="motivic volumes and rationality obstructions")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help, file=True):
        q = sub.add_parser(name, parents=[common], help=help)
        if file:
            q.add_argument("file", help="scenario JSON (bare names resolve in the corpus)")
        return q

    add("validate", "check a scenario and its complex")
    q = add("vol", "graded motivic volume")
    q.add_argument("--grade", type=int)
    add("vol-bir", "birational volume")
    add("vol-sb", "stable birational volume")
    q = add("obstruct", "rationality obstruction verdict")
    g = q.add_mutually_exclusive_group()
    g.add_argument("--stable", action="store_true", help="compare with the point (default)")
    g.add_argument("--rational", action="store_true", help="compare with P^n in degree n")
    g.add_argument("--parity", action="store_true", help="codimension parity rule")
    q.add_argument("--literal-point-target", action="store_true",
                   help="birational comparison against the point instead of P^n")
    q = add("reduce", "volume in a quotient ring")
    q.add_argument("--mod", required=True, choices=[r.value for r in Reduction])
    q.add_argument("--grade", type=int)
    add("faces", "face lattice of a cone scenario")
    q = add("equivariant", "equivariant volume")
    q.add_argument("--grade", type=int)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--restrict", type=int, metavar="M")
    g.add_argument("--forget", action="store_true")
    g.add_argument("--check-commute", action="store_true")
    q = add("corpus", "run the bundled scenarios against golden files", file=False)
    q.add_argument("--write-golden", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.command == "corpus":
            rep, ok = cmd_corpus(args)
            code = EXIT_OK if ok else EXIT_MISMATCH
        else:
            s = sc.load(sc.resolve_path(args.file))
            rep = COMMANDS[args.command](s, args)
            code = EXIT_OK
    except ValidationError as e:
        err = {"error": type(e).__name__, "message": str(e), "diagnostics": e.diagnostics}
        print(dumps(err) if args.json else f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetError as e:
        err = {"error": type(e).__name__, "message": str(e)}
        print(dumps(err) if args.json else f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    out.write((dumps(rep.data) if args.json else rep.text) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

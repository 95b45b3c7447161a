"""Command-line front end.

Exit codes: 0 when every checked claim holds, 1 when one fails (the report
carries the witness), 2 for usage errors and exhausted budgets.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import __version__
from .cohomology import e2_page
from .errors import BudgetExceededError, SylowGLError
from .fusion import (
    centric_radical_classification,
    groups_for,
    invariant_dims,
    outer_action_on_h1,
    GL_NORMALIZER_NOTE,
    H_S_FACTOR_NOTE,
)
from .groups import DEFAULT_BUDGET, GroupKind, build_group, closed_form_order, label_for
from .lattice import LATTICE_BUDGET, all_subgroups, default_cache_dir
from .pgroup import (
    Property,
    PropertyReport,
    is_abelian,
    is_elementary_abelian,
    is_p_group_report,
    is_powerful,
    omega_extendable_witness,
    pth_roots_report,
)
from .residue import Ctx, Mat2, det, mat_mul

SCHEMA = 1

# published subgroup class counts for the Sylow 3-subgroup of SL_2(Z/3^n)
EXPECTED_CLASS_COUNTS = {(3, 2): 20, (3, 3): 97, (3, 4): 282}

PROPERTIES = ["elementary-abelian", "abelian", "powerful", "omega-extendable", "p-group", "pth-roots", "arithmetic"]


@dataclass
class RunConfig:
    command: str
    p: int
    n: int
    kind: str
    budget: int
    cache_dir: str | None
    output: str
    seed: int


class UsageError(Exception):
    pass


# -- output ------------------------------------------------------------------


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) or _flat_list(x) for x in v)


def _scalar(v) -> str:
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    if v is None:
        return "-"
    return str(v)


def emit(obj: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(_text(obj)) + "\n")


def _header(cfg: RunConfig) -> dict:
    return {"schema": SCHEMA, "command": cfg.command, "p": cfg.p, "n": cfg.n, "kind": cfg.kind}


# -- commands ----------------------------------------------------------------


def cmd_group_info(cfg: RunConfig, args, out) -> int:
    ctx = Ctx(cfg.p, cfg.n)
    gl = cfg.kind == "gl"
    kinds = [(GroupKind.SYLOW_GL if gl else GroupKind.SYLOW_SL, None)]
    if cfg.n >= 2:
        kk = GroupKind.KERNEL_L if gl else GroupKind.KERNEL_K
        kinds += [(kk, 1), (kk, cfg.n - 1)] if cfg.n > 2 else [(kk, 1)]
    kinds.append((GroupKind.GL if gl else GroupKind.SL, None))
    rows = []
    over = False
    for kind, m in kinds:
        expected = closed_form_order(ctx, kind, m)
        row = {"group": label_for(ctx, kind, m), "closed_form": expected}
        try:
            g = build_group(ctx, kind, m=m, budget=cfg.budget)
            row["enumerated"] = g.order
            row["match"] = g.order == expected
        except BudgetExceededError:
            row["enumerated"] = None
            row["match"] = None
            over = True
        rows.append(row)
    report = _header(cfg) | {"groups": rows}
    emit(report, cfg.output, out)
    if any(r["match"] is False for r in rows):
        return 1
    return 2 if over else 0


def _pick_group(cfg: RunConfig, args):
    ctx = Ctx(cfg.p, cfg.n)
    name = (args.group or ("L" if cfg.kind == "gl" else "K")).upper()
    if name == "S":
        kind = GroupKind.SYLOW_GL if cfg.kind == "gl" else GroupKind.SYLOW_SL
        return build_group(ctx, kind, budget=cfg.budget)
    if name in ("K", "L"):
        if cfg.n < 2:
            raise UsageError("kernel groups need n >= 2")
        m = args.m if args.m is not None else 1
        kind = GroupKind.KERNEL_K if name == "K" else GroupKind.KERNEL_L
        return build_group(ctx, kind, m=m, budget=cfg.budget)
    raise UsageError(f"unknown group {args.group!r}; use S, K or L")


def _arithmetic_report(cfg: RunConfig, trials: int) -> PropertyReport:
    """Seeded spot-checks of associativity and det multiplicativity."""
    ctx = Ctx(cfg.p, cfg.n)
    rng = random.Random(cfg.seed)
    M = ctx.modulus
    for _ in range(trials):
        x, y, z = (Mat2(*(rng.randrange(M) for _ in range(4)), ctx) for _ in range(3))
        if mat_mul(mat_mul(x, y, ctx), z, ctx) != mat_mul(x, mat_mul(y, z, ctx), ctx):
            return PropertyReport(Property.ARITHMETIC, False, (x, y, z), {"check": "associativity"})
        if det(mat_mul(x, y, ctx), ctx) != det(x, ctx) * det(y, ctx) % M:
            return PropertyReport(Property.ARITHMETIC, False, (x, y), {"check": "det"})
    return PropertyReport(Property.ARITHMETIC, True, None, {"trials": trials, "seed": cfg.seed})


def cmd_verify(cfg: RunConfig, args, out) -> int:
    prop = args.property
    ctx = Ctx(cfg.p, cfg.n)
    if prop == "omega-extendable":
        which = (args.group or ("L" if cfg.kind == "gl" else "K")).upper()
        rep = omega_extendable_witness(ctx, which, budget=cfg.budget)
    elif prop == "pth-roots":
        rep = pth_roots_report(ctx)
    elif prop == "arithmetic":
        rep = _arithmetic_report(cfg, args.trials)
    else:
        g = _pick_group(cfg, args)
        fn = {"elementary-abelian": is_elementary_abelian, "abelian": is_abelian,
              "powerful": is_powerful, "p-group": is_p_group_report}[prop]
        rep = fn(g)
        rep.detail = {"group": g.label} | rep.detail
    report = _header(cfg) | {"verify": prop} | rep.to_dict()
    emit(report, cfg.output, out)
    return 0 if rep.holds else 1


def cmd_e2(cfg: RunConfig, args, out) -> int:
    caps = (args.cap_i, args.cap_j)
    if args.compare:
        n1, n2 = args.compare
        a = e2_page(Ctx(cfg.p, n1), cfg.kind, caps, budget=cfg.budget)
        b = e2_page(Ctx(cfg.p, n2), cfg.kind, caps, budget=cfg.budget)
        diff = a.diff(b)
        report = {"schema": SCHEMA, "command": "e2-compare", "p": cfg.p, "kind": cfg.kind.upper(),
                  "n": [n1, n2], "caps": list(caps), "diff": diff}
        if cfg.output == "csv":
            out.write("i,j,left,right\n")
            for d in diff:
                out.write(f"{d['i']},{d['j']},{d['left']},{d['right']}\n")
        else:
            emit(report, cfg.output, out)
        return 0 if not diff else 1
    table = e2_page(Ctx(cfg.p, cfg.n), cfg.kind, caps, budget=cfg.budget)
    if cfg.output == "csv":
        out.write(table.to_csv())
    elif cfg.output == "json":
        out.write(table.to_json() + "\n")
    else:
        out.write(f"E2 page, p={cfg.p} n={cfg.n} kind={cfg.kind.upper()} (rows j, columns i)\n")
        out.write(table.to_csv().replace(",", "\t"))
    return 0


def cmd_fusion(cfg: RunConfig, args, out) -> int:
    ctx = Ctx(cfg.p, cfg.n)
    if cfg.n < 2:
        raise UsageError("fusion needs n >= 2")
    K, S, G = groups_for(ctx, cfg.kind, budget=cfg.budget)
    cache = cfg.cache_dir if cfg.cache_dir is not None else default_cache_dir()
    lat = all_subgroups(S, budget=args.lattice_budget, cache_dir=cache, kind_tag=cfg.kind,
                        max_seconds=args.max_seconds)
    kname = "L_n" if cfg.kind == "gl" else "K_n"
    rep = centric_radical_classification(S, G, craven_filter=not args.no_craven_filter, lattice=lat,
                                         named={S.embed(K).key: kname})
    counts = dict(rep.class_counts)
    if args.ambient == "sylow":
        counts.pop("full")
    elif args.ambient == "full":
        counts.pop("sylow")
    body = rep.to_dict()
    body["class_counts"] = counts
    report = _header(cfg) | {"fusion": body}
    expected = EXPECTED_CLASS_COUNTS.get((cfg.p, cfg.n)) if cfg.kind == "sl" else None
    status = 0
    if expected is not None:
        matching = sorted(k for k in ("sylow", "full") if counts.get(k) == expected)
        report["expected_class_count"] = {"value": expected, "matching_ambients": matching}
        if not matching:
            status = 1
    crs = sorted(c.name for c in rep.centric_radical)
    report["centric_radical_is_kernel_and_sylow"] = crs == sorted([kname, "S"])
    if not report["centric_radical_is_kernel_and_sylow"]:
        status = 1
    if args.cap_degree is not None:
        mod = outer_action_on_h1(K, G)
        report["kernel_invariants"] = invariant_dims(mod, args.cap_degree, kname).to_dict()
        report["notes"] = [H_S_FACTOR_NOTE] + ([GL_NORMALIZER_NOTE] if cfg.kind == "gl" else [])
    emit(report, cfg.output, out)
    return status


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, default=3, help="odd prime (default 3)")
    common.add_argument("-n", type=int, default=2, help="exponent of the modulus p^n (default 2)")
    common.add_argument("--kind", choices=["sl", "gl"], default="sl")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max elements of any enumerated group")
    common.add_argument("--cache-dir", default=None, help="lattice cache directory (env SYLOWGL_CACHE_DIR)")
    common.add_argument("--format", dest="output", choices=["json", "csv", "text"], default="text")
    common.add_argument("--seed", type=int, default=0)

    ap = argparse.ArgumentParser(prog="sylowgl", description="Sylow subgroups of GL_2 and SL_2 over Z/p^n.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("group-info", parents=[common], help="enumerated orders against closed forms")

    v = sub.add_parser("verify", parents=[common], help="check a structural property with a witness")
    v.add_argument("property", choices=PROPERTIES)
    v.add_argument("--group", default=None, help="S, K or L (default K for sl, L for gl)")
    v.add_argument("--m", type=int, default=None, help="kernel level for K/L (default 1)")
    v.add_argument("--trials", type=int, default=10000, help="random triples for 'arithmetic'")

    e = sub.add_parser("e2", parents=[common], help="E2 page of the kernel extension")
    e.add_argument("--cap-i", type=int, default=6)
    e.add_argument("--cap-j", type=int, default=6)
    e.add_argument("--compare", type=int, nargs=2, metavar=("N1", "N2"), default=None)

    f = sub.add_parser("fusion", parents=[common], help="centric-radical classification and class counts")
    f.add_argument("--ambient", choices=["sylow", "full", "both"], default="both")
    f.add_argument("--no-craven-filter", action="store_true")
    f.add_argument("--cap-degree", type=int, default=None, help="also report kernel invariant dims to this degree")
    f.add_argument("--lattice-budget", type=int, default=LATTICE_BUDGET)
    f.add_argument("--max-seconds", type=float, default=None,
                   help="stop lattice growth after this long (partial result cached, exit 2)")
    return ap


COMMANDS = {"group-info": cmd_group_info, "verify": cmd_verify, "e2": cmd_e2, "fusion": cmd_fusion}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.p, args.n, args.kind, args.budget, args.cache_dir, args.output, args.seed)
    if cfg.output == "csv" and cfg.command not in ("e2",):
        print("sylowgl: csv output is only available for e2", file=sys.stderr)
        return 2
    try:
        Ctx(cfg.p, cfg.n)
        return COMMANDS[cfg.command](cfg, args, out)
    except BudgetExceededError as exc:
        print(f"sylowgl: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (UsageError, SylowGLError, ValueError) as exc:
        print(f"sylowgl: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

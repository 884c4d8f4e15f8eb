"""Command-line entry point: ``nonabelian-roth <command> ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import counting
from .certificate import verify_certificate_file
from .config import load_config
from .croot_sisask import SamplerConfig, bogolioubov_neighbourhood, build_system, conjugate_intersection
from .errors import RothError
from .groups import (
    catalog,
    generated_subgroup,
    parse_subset,
    random_symmetric_neighbourhood,
    resolve_group,
)
from .increment import run_iteration
from .msys import BohrSpec, bohr_system, subgroup_chain_system, verify_system

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _emit(args, payload, rows=None, header=None) -> None:
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise RothError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_catalog(args) -> int:
    rows = [[name, g.order, g.abelian, g.name] for name, g in catalog(args.max_order)]
    payload = [{"name": r[0], "order": r[1], "abelian": r[2], "descriptor": r[3]} for r in rows]
    _emit(args, payload, rows, ["name", "order", "abelian", "descriptor"])
    return EXIT_OK


def cmd_count(args) -> int:
    G = resolve_group(args.group)
    A = parse_subset(G, args.subset)
    eq = counting.EquationKind.parse(args.eq)
    total, nontrivial = counting.count_triples(A, eq)
    payload = {"group": G.name, "subset": A.elements(), "eq": eq.value, "total": total,
               "nontrivial": nontrivial, "solution_free": nontrivial == 0}
    _emit(args, payload, [[G.name, A.card, eq.value, total, nontrivial]],
          ["group", "size", "eq", "total", "nontrivial"])
    return EXIT_OK


def cmd_search(args) -> int:
    eq = counting.EquationKind.parse(args.eq)
    groups = catalog(args.max_order) if args.group == "catalog" else [(args.group, resolve_group(args.group))]
    reports = [counting.max_solution_free(G, eq, args.budget) for _, G in groups]
    _emit(args, [r.to_dict() for r in reports] if len(reports) > 1 else reports[0].to_dict(),
          [r.csv_row() for r in reports], counting.CSV_HEADER)
    return EXIT_OK


def _lemma_bogolioubov(G, p, cfg, rng):
    X = parse_subset(G, p["X"]) if "X" in p else random_symmetric_neighbourhood(G, float(p.get("density", 0.5)), rng)
    k = int(p.get("k", 3))
    res = bogolioubov_neighbourhood(X, k, cfg)
    return res.certified, {"X": X.to_hex(), "S": res.S.to_hex(), "k": k, "density": res.density,
                           "retries": res.log["retries"]}


def _lemma_conjugate(G, p, cfg, rng):
    S = parse_subset(G, p["S"]) if "S" in p else random_symmetric_neighbourhood(G, float(p.get("density", 0.5)), rng)
    g, h = int(p.get("g", 0)), int(p.get("h", 0))
    res = conjugate_intersection(S, g, h, cfg)
    return res.certified, {"S": S.to_hex(), "X": res.S.to_hex(), "g": g, "h": h, "density": res.density}


def _lemma_build_system(G, p, cfg, rng):
    X = parse_subset(G, p["X"]) if "X" in p else random_symmetric_neighbourhood(G, float(p.get("density", 0.5)), rng)
    sys_, S = build_system(X, int(p.get("r", 1)), float(p.get("epsilon", 0.25)), cfg)
    rep = verify_system(sys_)
    return rep.ok, {"system": sys_.to_dict(), "S": S.to_hex(), "report": rep.to_dict()}


def _lemma_bohr(G, p, cfg, rng):
    freqs = [int(t) for t in p.get("frequencies", "1").split(",")]
    spec = BohrSpec(G, tuple(freqs), float(p.get("width", 1.0)))
    sys_, l, j = bohr_system(spec, float(p.get("epsilon", 0.25)))
    rep = verify_system(sys_)
    return rep.ok, {"system": sys_.to_dict(), "l": l, "j": j, "report": rep.to_dict()}


def _lemma_subgroup_chain(G, p, cfg, rng):
    chain = [generated_subgroup(parse_subset(G, part)) for part in p.get("chain", "all;0").split(";")]
    sys_ = subgroup_chain_system(chain, float(p.get("epsilon", 0.0)))
    rep = verify_system(sys_)
    return rep.ok, {"system": sys_.to_dict(), "report": rep.to_dict()}


LEMMAS = {
    "bogolioubov": _lemma_bogolioubov,
    "conjugate-intersection": _lemma_conjugate,
    "build-system": _lemma_build_system,
    "bohr-system": _lemma_bohr,
    "subgroup-chain": _lemma_subgroup_chain,
}


def cmd_verify(args) -> int:
    G = resolve_group(args.group)
    p = _params(args.param)
    if args.subset:
        p.setdefault("X", args.subset)
    cfg = SamplerConfig(seed=args.seed)
    rng = np.random.default_rng(args.seed)
    ok, detail = LEMMAS[args.lemma](G, p, cfg, rng)
    _emit(args, {"lemma": args.lemma, "group": G.name, "seed": args.seed, "certified": bool(ok), **detail})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_pipeline(args) -> int:
    G = resolve_group(args.group)
    A = parse_subset(G, args.subset)
    overrides = {"seed": args.seed} if args.seed is not None else {}
    cfg = load_config(args.config, overrides)
    cert = run_iteration(G, A, cfg)
    text = cert.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check_cert(args) -> int:
    rep = verify_certificate_file(args.path, replay=not args.no_replay)
    _emit(args, rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonabelian-roth", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, group=True):
        if group:
            p.add_argument("--group", required=True, help="catalog name (C7, Q8, S4) or descriptor")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("catalog", help="list the built-in groups")
    p.add_argument("--max-order", type=int)
    common(p, group=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("count", help="count solutions inside a subset")
    common(p)
    p.add_argument("--subset", required=True, help="'order:hex', '0,1,3' or 'all'")
    p.add_argument("--eq", default="square")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("search", help="largest solution-free set (use --group catalog for a table)")
    common(p)
    p.add_argument("--eq", default="square")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--max-order", type=int, default=24)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="run and certify one construction")
    p.add_argument("lemma", choices=sorted(LEMMAS))
    common(p)
    p.add_argument("--subset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("pipeline", help="run the increment iteration and emit a certificate")
    common(p)
    p.add_argument("--subset", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="key=value constants file")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("check-cert", help="verify a certificate file")
    p.add_argument("path")
    p.add_argument("--no-replay", action="store_true")
    common(p, group=False)
    p.set_defaults(func=cmd_check_cert)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RothError as exc:
        sys.stdout.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        sys.stdout.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 finished (property holds where one is tested), 1 finished
with a negative verdict, 2 usage or input error, 3 resource cap hit,
4 file could not be read or written.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import ci, witness
from .cache import ENV_VAR, resolve_cache_dir
from .digraph import (
    cayley_digraph,
    format_digraph,
    is_cover,
    is_directed_cycle,
    is_strongly_connected,
    orbit_quotient,
    read_digraph,
    write_atomic,
    write_digraph,
)
from .errors import DomainError, ResourceError, ValidationError
from .groups import AUT_CAP, automorphisms, element_order, generated_subgroup, parse_group
from .iso import VERTEX_CAP, BabaiVerdict, automorphism_group, babai_ci_test
from .perm import ELEMENT_CAP, subgroup_image

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    aut_cap: int = AUT_CAP
    vertex_cap: int = VERTEX_CAP
    budget: int = ci.SURVEY_BUDGET
    babai_cap: int = ELEMENT_CAP
    workers: int = 1
    out: str | None = None
    fmt: str = "json"
    cache_dir: str | None = None

    def __post_init__(self):
        for name in ("aut_cap", "vertex_cap", "budget", "babai_cap"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")


def _int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default="json")
    p.add_argument("--aut-cap", type=_int, default=AUT_CAP, help="largest |G| for automorphism enumeration")
    p.add_argument("--vertex-cap", type=_int, default=VERTEX_CAP, help="largest digraph to canonicalize")
    p.add_argument("--budget", type=_int, default=ci.SURVEY_BUDGET, help="survey orbit/subset budget")
    p.add_argument("--babai-cap", type=_int, default=ELEMENT_CAP, help="largest |Aut| for the babai method")
    p.add_argument("--workers", type=_int, default=1)
    p.add_argument("--cache-dir", help=f"canonical-form cache directory (or set {ENV_VAR})")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="qdci", description="Cayley digraphs of Q4n and CI/m-DCI experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    group = sub.add_parser("group", help="inspect a group").add_subparsers(dest="action", required=True)
    g = group.add_parser("info", parents=[common])
    g.add_argument("group")

    cayley = sub.add_parser("cayley", help="build Cayley digraphs").add_subparsers(dest="action", required=True)
    c = cayley.add_parser("build", parents=[common])
    c.add_argument("group")
    c.add_argument("--set", required=True, dest="set_expr")

    a = sub.add_parser("aut", parents=[common], help="automorphism group of a digraph file")
    a.add_argument("--digraph", required=True)

    cis = sub.add_parser("ci", help="CI tests and surveys").add_subparsers(dest="action", required=True)
    t = cis.add_parser("test", parents=[common])
    t.add_argument("group")
    t.add_argument("--set", required=True, dest="set_expr")
    t.add_argument("--method", choices=("canonical", "babai"), default="canonical")
    s = cis.add_parser("survey", parents=[common])
    s.add_argument("group")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--omit-timing", action="store_true", help="write wall_time_ms as null")
    v = cis.add_parser("verify-cert", parents=[common])
    v.add_argument("path")

    wit = sub.add_parser("witness", help="non-CI witness pairs").add_subparsers(dest="action", required=True)
    we = wit.add_parser("even", parents=[common])
    we.add_argument("--n", type=int, required=True)
    we.add_argument("--m", type=int, required=True)
    wp = wit.add_parser("podd", parents=[common])
    wp.add_argument("--n", type=int, required=True)
    wp.add_argument("--m", type=int, required=True)
    wp.add_argument("--p", type=int, required=True)

    q = sub.add_parser("quotient", parents=[common], help="quotient of a Cayley digraph by R(<H>)")
    q.add_argument("--digraph", required=True)
    q.add_argument("--by", required=True, help="generators of H, e.g. 'a^2'")
    q.add_argument("--group", help="group of the Cayley digraph (default Q4n:<V/4>)")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        aut_cap=args.aut_cap,
        vertex_cap=args.vertex_cap,
        budget=args.budget,
        babai_cap=args.babai_cap,
        workers=args.workers,
        out=args.out,
        fmt=args.fmt,
        cache_dir=resolve_cache_dir(args.cache_dir),
    )


def _emit(cfg: RunConfig, text: str, out) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        out.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text(d: dict) -> str:
    return "".join(f"{k}: {v}\n" for k, v in d.items())


def _render(cfg: RunConfig, d: dict) -> str:
    if cfg.fmt == "json":
        return _dump(d)
    if cfg.fmt == "text":
        return _text(d)
    raise UsageError("csv output is available for ci survey only")


# commands ----------------------------------------------------------------------------


def _group_info(args, cfg, out):
    G = parse_group(args.group)
    info = {
        "group": G.descriptor(),
        "order": G.order,
        "generators": {name: G.render(x) for name, x in G.generators},
    }
    orders: dict[int, int] = {}
    for x in G.elements():
        o = element_order(G, x)
        orders[o] = orders.get(o, 0) + 1
    info["element_orders"] = {str(k): orders[k] for k in sorted(orders)}
    info["automorphisms"] = len(automorphisms(G, cap=cfg.aut_cap))
    _emit(cfg, _render(cfg, info), out)
    return EXIT_OK


def _cayley_build(args, cfg, out):
    G = parse_group(args.group)
    S = G.parse_set(args.set_expr)
    D = cayley_digraph(G, S)
    if cfg.out:
        write_digraph(D, cfg.out)
    else:
        out.write(format_digraph(D))
    return EXIT_OK


def _aut(args, cfg, out):
    D = read_digraph(args.digraph)
    A = automorphism_group(D, cfg.vertex_cap)
    info = {
        "vertices": D.n,
        "arcs": D.arc_count(),
        "order": A.order(),
        "orbits": [list(b) for b in A.orbits().blocks],
        "generators": [list(g) for g in A.generators],
        "strongly_connected": is_strongly_connected(D),
    }
    _emit(cfg, _render(cfg, info), out)
    return EXIT_OK


def _ci_test(args, cfg, out):
    G = parse_group(args.group)
    S = G.parse_set(args.set_expr)
    if args.method == "babai":
        verdict = babai_ci_test(G, S, cfg.babai_cap)
        info = {"group": G.descriptor(), "S": S.render(), "method": "babai", "verdict": verdict.value}
        _emit(cfg, _render(cfg, info), out)
        return {BabaiVerdict.CI: EXIT_OK, BabaiVerdict.NOT_CI: EXIT_NEGATIVE}.get(verdict, EXIT_RESOURCE)
    v = ci.ci_subset_test(G, S, cfg.budget, cfg.vertex_cap, cfg.aut_cap, cfg.cache_dir)
    _emit(cfg, _render(cfg, v.to_dict()), out)
    return EXIT_OK if v.is_ci else EXIT_NEGATIVE


def _ci_survey(args, cfg, out):
    G = parse_group(args.group)
    report = ci.mdci_survey(G, args.m, cfg.workers, cfg.budget, cfg.vertex_cap, cfg.aut_cap, cfg.cache_dir)
    if cfg.fmt == "json":
        text = report.to_json(timing=not args.omit_timing)
    elif cfg.fmt == "csv":
        text = report.to_csv()
    else:
        text = report.to_text()
    _emit(cfg, text, out)
    return EXIT_OK if report.mdci_holds else EXIT_NEGATIVE


def _verify_cert(args, cfg, out):
    with open(args.path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.path}: not valid JSON ({exc})") from None
    certs = ci.certificates_in(doc)
    if not certs:
        raise ValidationError(f"{args.path}: no certificates found")
    results = []
    for cert in certs:
        ok, reason = ci.verify_certificate(cert, cfg.aut_cap)
        results.append({"S": cert.get("S"), "T": cert.get("T"), "valid": ok, "reason": reason})
    all_ok = all(r["valid"] for r in results)
    _emit(cfg, _render(cfg, {"certificates": len(results), "all_valid": all_ok, "results": results}), out)
    return EXIT_OK if all_ok else EXIT_NEGATIVE


def _witness(args, cfg, out):
    if args.action == "even":
        w = witness.even_witness(args.n, args.m)
    else:
        w = witness.podd_witness(args.n, args.m, args.p)
    _emit(cfg, _render(cfg, w.to_dict()), out)
    return EXIT_OK


def _quotient(args, cfg, out):
    D = read_digraph(args.digraph)
    if args.group:
        G = parse_group(args.group)
    elif D.n % 4 == 0 and D.n // 4 >= 3:
        G = parse_group(f"Q4n:{D.n // 4}")
    else:
        raise UsageError("cannot infer the group from the vertex count; pass --group")
    if G.order != D.n:
        raise DomainError(f"{G.descriptor()} has order {G.order} but the digraph has {D.n} vertices")
    H = generated_subgroup(G, G.parse_set(args.by).members)
    N = subgroup_image(G, H)
    quotient, part = orbit_quotient(D, N)
    info = {
        "group": G.descriptor(),
        "subgroup": [G.render(x) for x in H],
        "orbits": [[G.render(x) for x in b] for b in part.blocks],
        "quotient_vertices": quotient.n,
        "quotient_arcs": quotient.arcs(),
        "is_cover": is_cover(D, N),
        "quotient_is_directed_cycle": is_directed_cycle(quotient),
    }
    _emit(cfg, _render(cfg, info), out)
    return EXIT_OK


_HANDLERS = {
    ("group", "info"): _group_info,
    ("cayley", "build"): _cayley_build,
    ("aut", None): _aut,
    ("ci", "test"): _ci_test,
    ("ci", "survey"): _ci_survey,
    ("ci", "verify-cert"): _verify_cert,
    ("witness", "even"): _witness,
    ("witness", "podd"): _witness,
    ("quotient", None): _quotient,
}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = _config(args)
        handler = _HANDLERS[(args.command, getattr(args, "action", None))]
        return handler(args, cfg, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, ValidationError) as exc:
        err.write(f"invalid input: {exc}\n")
        return EXIT_USAGE
    except ResourceError as exc:
        err.write(f"resource cap: {exc}\n")
        return EXIT_RESOURCE
    except OSError as exc:
        err.write(f"file error: {exc}\n")
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

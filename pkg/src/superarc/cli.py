"""Command-line driver.

Commands cover ad-hoc OPE queries, the realization verifiers, Sugawara
vectors, graded-dimension tables, quotient presentations, arc Hilbert
series, jet invariants and the full freeness certificate.  Exit codes:
0 success, 1 mathematical failure or mismatch, 2 usage or resource errors.
All numeric output is exact; reports echo the configuration, the tool
version and the normal-ordering convention.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import SCHEMA_VERSION, __version__
from .errors import ResourceCapError, SuperarcError, UsageError
from .fields import FieldPoly, FreeFieldContext, format_poly, ope
from .parser import parse_poly

ENV_CAP = "SUPERARC_MAX_MONOMIALS"


@dataclass
class RunConfig:
    command: str
    family: str = "s2"
    n: int = 1
    m: int = 1
    r: int = 1
    max_weight: Fraction = Fraction(2)
    dmax: int = 2
    delta_max: Fraction | None = None
    bg: int = 1
    bc: int = 1
    which: str = "coset"
    threads: int = 1
    seed: int = 0
    fmt: str = "text"
    output: str | None = None
    output_dir: str | None = None
    max_monomials: int = 2_000_000
    exprs: list = field(default_factory=list)

    def validate(self):
        if self.command in ("verify-ope", "coset-check", "embed-check", "sugawara",
                            "char", "zhu", "arc-hilbert", "certify"):
            if self.n < 1 or self.r < 1 or self.m < 0:
                raise UsageError(f"parameters out of range: n={self.n} m={self.m} r={self.r}")
        if self.command == "invariants" and (self.n < 1 or self.m < 0 or self.r < 0):
            raise UsageError(f"parameters out of range: n={self.n} m={self.m} r={self.r}")
        if self.max_weight < 0:
            raise UsageError("max weight must be nonnegative")
        if self.threads < 1:
            raise UsageError("thread count must be positive")
        if self.max_monomials < 1:
            raise UsageError("monomial cap must be positive")
        if self.dmax < 1:
            raise UsageError("dmax must be positive")

    def echo(self) -> dict:
        out = {"command": self.command, "threads": self.threads, "seed": self.seed}
        if self.command == "ope":
            out.update({"bg": self.bg, "bc": self.bc, "exprs": self.exprs})
        elif self.command == "invariants":
            out.update({"n": self.n, "m": self.m, "r": self.r,
                        "max_weight": str(self.max_weight)})
        else:
            out.update({"family": self.family, "n": self.n, "m": self.m, "r": self.r})
            if self.command in ("char", "zhu", "arc-hilbert", "certify"):
                out["max_weight"] = str(self.max_weight)
            if self.command in ("zhu", "arc-hilbert", "certify"):
                out["dmax"] = self.dmax
        return out


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid rational {text!r}") from exc


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="superarc",
        description="exact free-field vertex superalgebra engine")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, params=True, weight=False, dmax=False):
        p.add_argument("--threads", type=int, default=1,
                       help="compute thread knob; never changes results")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", dest="fmt", choices=("json", "csv", "text"),
                       default="text")
        p.add_argument("--output", default=None, help="write the report here")
        p.add_argument("--output-dir", default=None,
                       help="write reports/<command>/<params>.json under this root")
        p.add_argument("--max-monomials", type=int,
                       default=int(os.environ.get(ENV_CAP, 2_000_000)))
        if params:
            p.add_argument("--family", choices=("s1", "s2"), default="s2")
            p.add_argument("--n", type=int, default=1)
            p.add_argument("--m", type=int, default=1)
            p.add_argument("--r", type=int, default=1)
        if weight:
            p.add_argument("--max-weight", default="2")
        if dmax:
            p.add_argument("--dmax", type=int, default=2)
            p.add_argument("--delta-max", default=None)

    p = sub.add_parser("ope", help="print the singular OPE of two expressions")
    p.add_argument("exprs", nargs=2, metavar="EXPR")
    p.add_argument("--bg", type=int, default=1, help="beta-gamma rank")
    p.add_argument("--bc", type=int, default=1, help="b-c rank")
    common(p, params=False)

    for name, hlp in (("verify-ope", "check every current pair OPE"),
                      ("coset-check", "check mutual regularity"),
                      ("embed-check", "check the conformal embedding"),
                      ("sugawara", "print a Sugawara vector")):
        p = sub.add_parser(name, help=hlp)
        common(p)
        if name == "sugawara":
            p.add_argument("--which", choices=("inner", "coset"), default="coset")

    p = sub.add_parser("char", help="graded dimensions of the coset subalgebra")
    common(p, weight=True)
    p = sub.add_parser("zhu", help="quotient presentation of the coset subalgebra")
    common(p, weight=True, dmax=True)
    p = sub.add_parser("arc-hilbert", help="arc-space Hilbert series of the quotient")
    common(p, weight=True, dmax=True)
    p = sub.add_parser("invariants", help="jet-group invariant dimensions")
    common(p, weight=True)
    p = sub.add_parser("certify", help="truncated classical-freeness certificate")
    common(p, weight=True, dmax=True)
    return ap


def config_from_args(argv) -> RunConfig:
    ap = build_arg_parser()
    ns = ap.parse_args(argv)
    cfg = RunConfig(command=ns.command)
    for attr in ("family", "n", "m", "r", "bg", "bc", "which", "threads", "seed",
                 "fmt", "output", "max_monomials", "exprs", "dmax"):
        if hasattr(ns, attr):
            setattr(cfg, attr, getattr(ns, attr))
    if hasattr(ns, "output_dir"):
        cfg.output_dir = ns.output_dir
    if hasattr(ns, "max_weight"):
        cfg.max_weight = _frac(ns.max_weight)
    if getattr(ns, "delta_max", None) is not None:
        cfg.delta_max = _frac(ns.delta_max)
    cfg.validate()
    return cfg


# -- command handlers ----------------------------------------------------------

def _cmd_ope(cfg: RunConfig):
    ctx = FreeFieldContext(cfg.bg, cfg.bc)
    a = parse_poly(cfg.exprs[0], ctx)
    b = parse_poly(cfg.exprs[1], ctx)
    result = ope(a, b)
    payload = {
        "poles": result.to_json_obj(),
        "poles_text": {str(p): format_poly(f) for p, f in sorted(result.poles.items())},
        "regular": result.is_regular(),
    }
    lines = [f"pole {p}: {format_poly(f)}" for p, f in
             sorted(result.poles.items(), reverse=True)] or ["regular"]
    return 0, payload, "\n".join(lines)


def _build_pair(cfg: RunConfig):
    from .affine import build_realization
    return build_realization(cfg.family, cfg.n, cfg.m, cfg.r, verify=False)


def _cmd_verify_ope(cfg: RunConfig):
    from .affine import verify_affine_ope
    pair = _build_pair(cfg)
    reports = [verify_affine_ope(pair.inner), verify_affine_ope(pair.coset)]
    ok = all(r.ok for r in reports)
    payload = {"reports": [r.to_json_obj() for r in reports], "ok": ok}
    lines = [f"{r.label}: {r.pairs_checked - len(set(f['pair'] for f in r.failures))}"
             f"/{r.pairs_checked} pairs pass" for r in reports]
    return (0 if ok else 1), payload, "\n".join(lines)


def _cmd_coset_check(cfg: RunConfig):
    from .affine import verify_coset
    report = verify_coset(_build_pair(cfg))
    payload = {"report": report.to_json_obj(), "ok": report.ok}
    text = f"{report.label}: {report.pairs_checked} mixed pairs, " + \
        ("all regular" if report.ok else f"{len(report.failures)} non-regular")
    return (0 if report.ok else 1), payload, text


def _cmd_embed_check(cfg: RunConfig):
    from .affine import verify_conformal_embedding
    report = verify_conformal_embedding(_build_pair(cfg))
    payload = report.to_json_obj()
    text = (f"c_inner = {report.c_inner}, c_coset = {report.c_coset}, "
            f"sum expected {report.c_expected}; identity "
            + ("holds" if report.identity_defect.is_zero() else "FAILS"))
    return (0 if report.ok else 1), payload, text


def _cmd_sugawara(cfg: RunConfig):
    from .affine import central_charge_formula, sugawara
    from .fields import central_charge
    pair = _build_pair(cfg)
    real = pair.inner if cfg.which == "inner" else pair.coset
    vector = sugawara(real)
    c = central_charge(vector)
    ok = c == central_charge_formula(real)
    payload = {"algebra": real.algebra.name, "level": str(real.level),
               "central_charge": str(c), "vector": vector.to_json_obj(), "ok": ok}
    return (0 if ok else 1), payload, \
        f"L[{real.algebra.name} k={real.level}] c = {c}\n{format_poly(vector)}"


def _table_payload(dims, w2max):
    return [[str(Fraction(w2, 2)), d] for w2, d in enumerate(dims[: w2max + 1])]


def _cmd_char(cfg: RunConfig):
    from .fock import subalgebra_graded_dims
    pair = _build_pair(cfg)
    w2max = int(2 * cfg.max_weight)
    gens = [pair.coset.currents[i] for i in range(pair.coset.algebra.dim)]
    dims = subalgebra_graded_dims(pair.ctx, gens, w2max, cfg.max_monomials)
    payload = {"algebra": pair.coset.algebra.name, "level": str(pair.coset.level),
               "dims": _table_payload(dims, w2max)}
    text = "\n".join(f"{w}\t{d}" for w, d in payload["dims"])
    return 0, payload, text


def _cmd_zhu(cfg: RunConfig):
    from .arcjet import presentation_from_realization
    pair = _build_pair(cfg)
    delta = cfg.delta_max if cfg.delta_max is not None else cfg.max_weight
    pres, span, c2p = presentation_from_realization(pair, cfg.dmax, delta,
                                                    cap=cfg.max_monomials)
    payload = {
        "generators": [{"label": l, "parity": p, "weight": "1"}
                       for l, p in zip(pres.labels, pres.parities)],
        "rv_dims": _table_payload(c2p.rv_dims, len(c2p.rv_dims) - 1),
        "relations": [
            {"degree": d,
             "monomials": [{"gens": [pres.labels[g] for g, _ in mono],
                            "coeff": str(c)} for mono, c in sorted(rel.items())]}
            for rel, d in zip(pres.relations, c2p.relation_degrees)],
        "dmax": cfg.dmax,
        "verified_through_weight": str(delta),
        "hash": pres.content_hash(),
    }
    text = (f"{len(pres.labels)} generators, {len(pres.relations)} relations "
            f"(degrees {sorted(set(c2p.relation_degrees)) or '-'}), "
            f"R_V dims {[d for _, d in payload['rv_dims']]}")
    return 0, payload, text


def _cmd_arc_hilbert(cfg: RunConfig):
    from .arcjet import presentation_from_realization, quotient_dims
    pair = _build_pair(cfg)
    delta = cfg.delta_max if cfg.delta_max is not None else cfg.max_weight
    pres, _, _ = presentation_from_realization(pair, cfg.dmax, delta,
                                               cap=cfg.max_monomials)
    table = quotient_dims(pres, cfg.max_weight, cfg.max_monomials)
    payload = {"dims": _table_payload(table.dims, table.w2max), "meta": table.meta}
    text = "\n".join(f"{w}\t{d}" for w, d in payload["dims"])
    return 0, payload, text


def _cmd_invariants(cfg: RunConfig):
    from .arcjet import jet_invariant_dims
    table = jet_invariant_dims(cfg.n, cfg.m, cfg.r, cfg.max_weight,
                               cfg.max_monomials)
    payload = {"dims": _table_payload(table.dims, table.w2max)}
    text = "\n".join(f"{w}\t{d}" for w, d in payload["dims"])
    return 0, payload, text


def _cmd_certify(cfg: RunConfig):
    from .arcjet import certify_classical_freeness
    cert = certify_classical_freeness(cfg.n, cfg.m, cfg.r, cfg.max_weight,
                                      dmax=cfg.dmax, delta_max=cfg.delta_max,
                                      cap=cfg.max_monomials)
    payload = cert.to_json_obj()
    verdict = cert.verdict["verdict"]
    text = (f"certificate ({cfg.n},{cfg.m},{cfg.r}) through weight "
            f"{cfg.max_weight}: {verdict}; {cert.simplicity_label}")
    return (0 if cert.equal else 1), payload, text


_HANDLERS = {
    "ope": _cmd_ope,
    "verify-ope": _cmd_verify_ope,
    "coset-check": _cmd_coset_check,
    "embed-check": _cmd_embed_check,
    "sugawara": _cmd_sugawara,
    "char": _cmd_char,
    "zhu": _cmd_zhu,
    "arc-hilbert": _cmd_arc_hilbert,
    "invariants": _cmd_invariants,
    "certify": _cmd_certify,
}


def _params_slug(cfg: RunConfig) -> str:
    if cfg.command == "ope":
        return f"bg{cfg.bg}_bc{cfg.bc}"
    parts = []
    if cfg.command != "invariants":
        parts.append(cfg.family)
    parts += [f"n{cfg.n}", f"m{cfg.m}", f"r{cfg.r}"]
    if cfg.command in ("char", "zhu", "arc-hilbert", "invariants", "certify"):
        parts.append(f"N{str(cfg.max_weight).replace('/', 'over')}")
    return "_".join(parts)


def _emit(cfg: RunConfig, code: int, payload: dict, text: str):
    report = {
        "schema": SCHEMA_VERSION,
        "tool": "superarc",
        "version": __version__,
        "normal_ordering": "left-nested",
        "config": cfg.echo(),
        "status": "ok" if code == 0 else "fail",
    }
    report.update(payload)
    if cfg.fmt == "json":
        body = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif cfg.fmt == "csv" and "dims" in payload:
        body = "weight,dim\n" + "".join(f"{w},{d}\n" for w, d in payload["dims"])
    else:
        body = text + "\n"
    wrote = False
    if cfg.output_dir:
        path = os.path.join(cfg.output_dir, "reports", cfg.command,
                            _params_slug(cfg) + ".json")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        wrote = True
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(body)
        wrote = True
    if not wrote or cfg.fmt != "json":
        sys.stdout.write(body)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = config_from_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 on --help
        return 0 if exc.code in (0, None) else 2
    try:
        code, payload, text = _HANDLERS[cfg.command](cfg)
    except (UsageError, ResourceCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SuperarcError as exc:
        # flush a failure marker so partial runs stay inspectable
        _emit(cfg, 1, {"error": str(exc)}, f"FAILED: {exc}")
        return 1
    _emit(cfg, code, payload, text)
    return code


if __name__ == "__main__":
    sys.exit(main())

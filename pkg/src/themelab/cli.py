"""Command line front end for the theme engine.

Commands: invariants, bernstein, canonical, isom, invariance, scan, verify.
Reports are deterministic; identical inputs produce byte-identical JSON.
Exit codes: 0 classified/verified, 1 parse or validation error, 2 some
result inconclusive at the working precision, 3 precision exhausted.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import (
    BasisChange,
    Distinguisher,
    ScanPoint,
    ScanReport,
    invariance_test,
    isomorphism_test,
    parameter_of_rank2,
    scan_family,
)
from .errors import (
    Inconclusive,
    NotNormalized,
    Obstruction,
    ParseError,
    PrecisionError,
    ThemeLabError,
)
from .parsing import (
    Document,
    GeneratorDocument,
    ThemeDocument,
    document_from_dict,
    grid_points,
    load_document,
    parse_series,
)
from .themes import (
    FundamentalInvariants,
    ThemePresentation,
    bernstein_from_generator,
    canonical_point,
    canonical_space,
    embed_into_xi,
    invariants_from_bernstein,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INCONCLUSIVE = 2
EXIT_PRECISION = 3

_COMMANDS = ("invariants", "bernstein", "canonical", "isom", "invariance",
             "scan", "verify")


@dataclass
class JobSpec:
    command: str
    inputs: List[str]
    prec: Optional[int] = None
    json_output: bool = False
    grid: Optional[str] = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1, not argparse's default 2
        raise ParseError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="theme-lab",
                     description="exact classification of theme presentations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, nargs, help_text in (
            ("invariants", 1, "rank and fundamental invariants of one theme"),
            ("bernstein", 1, "Bernstein element of one theme or generator"),
            ("canonical", 1, "canonical parameter space of one theme"),
            ("isom", 2, "decide isomorphism of two presentations"),
            ("invariance", 1, "search an invariance witness for one theme"),
            ("scan", 1, "classify a family over its parameter grid"),
            ("verify", 1, "re-check a previously emitted JSON report")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("inputs", nargs=nargs, metavar="DOC")
        p.add_argument("--prec", type=int, default=None,
                       help="working precision override (>= 8)")
        p.add_argument("--json", action="store_true", dest="json_output",
                       help="emit the JSON report instead of text")
        if name != "verify":
            p.add_argument("--grid", default=None,
                           help='grid override, e.g. "z=-2..2 step 1/2"')
    return parser


def _fmt_point(point: Dict[str, Fraction]) -> str:
    return ", ".join(f"{n} = {point[n]}" for n in sorted(point))


def _point_payload(sp: ScanPoint) -> dict:
    out: dict = {
        "point": {n: str(v) for n, v in sorted(sp.point.items())},
        "rank": ({"lower": sp.rank.lower, "upper": sp.rank.upper}
                 if sp.rank is not None else None),
        "bernstein": ([str(m) for m in sp.bernstein]
                      if sp.bernstein is not None else None),
        "invariants": ({"lambda1": str(sp.invariants.lambda1),
                        "p": list(sp.invariants.p)}
                       if sp.invariants is not None else None),
        "flags": list(sp.flags),
    }
    if sp.error is not None:
        out["error"] = sp.error
    return out


def _point_text(sp: ScanPoint) -> str:
    bits = []
    if sp.rank is not None:
        if sp.rank.lower == sp.rank.upper:
            bits.append(f"rank {sp.rank.lower}")
        else:
            bits.append(f"rank {sp.rank.lower}..{sp.rank.upper}")
    if sp.bernstein is not None:
        bits.append("bernstein [" + ", ".join(str(m) for m in sp.bernstein) + "]")
    if sp.invariants is not None:
        bits.append(f"invariants (lambda1 = {sp.invariants.lambda1}, "
                    f"p = {list(sp.invariants.p)})")
    if sp.error is not None:
        bits.append(sp.error)
    line = "; ".join(bits) if bits else "unclassified"
    shown = [f for f in sp.flags if f not in ("invariant",)]
    tail = f"  [{', '.join(shown)}]" if shown else ""
    head = _fmt_point(sp.point) or "input"
    extra = "  (invariant)" if "invariant" in sp.flags else ""
    return f"{head}: {line}{tail}{extra}"


def _scan_exit(report: ScanReport) -> int:
    flags = {f for sp in report.points for f in sp.flags}
    if "error" in flags:
        return EXIT_PARSE
    if "precision" in flags:
        return EXIT_PRECISION
    if "inconclusive" in flags or "rank-inconclusive" in flags:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _single_point(doc: Document, grid: Optional[str]) -> Dict[str, Fraction]:
    pts = grid_points(doc, grid)
    if len(pts) != 1:
        raise ParseError("this command takes a single point; use scan for grids")
    return pts[0]


def _payload_at(doc: Document, point: Dict[str, Fraction]):
    if isinstance(doc, GeneratorDocument):
        return doc.element(point)
    return doc.presentation(point)


# ---------------------------------------------------------------------------
# command handlers: each returns (exit code, json payload, text lines)


def _run_invariants(docs: Sequence[Document], grid: Optional[str]):
    doc = docs[0]
    point = _single_point(doc, grid)
    report = scan_family([(point, _payload_at(doc, point))])
    sp = report.points[0]
    lines = [_point_text(sp)]
    return _scan_exit(report), {"points": [_point_payload(sp)]}, lines


def _run_bernstein(docs: Sequence[Document], grid: Optional[str]):
    doc = docs[0]
    point = _single_point(doc, grid)
    payload = _payload_at(doc, point)
    if isinstance(payload, ThemePresentation):
        k = payload.k
        phi = embed_into_xi(payload)
    else:
        phi = payload
        from .classify import thematic_rank
        cert = thematic_rank(phi, phi.N + 1)
        if cert.lower != cert.upper or cert.lower == 0:
            raise Inconclusive(
                f"thematic rank only bounded between {cert.lower} and "
                f"{cert.upper} at prec {cert.prec}")
        k = cert.lower
    S, op = bernstein_from_generator(phi, k)
    exps = op.exponents()
    result = {
        "exponents": [str(m) for m in exps],
        "operator": repr(op),
        "sigma": [str(c) for c in op.c],
        "S": [s.to_literal() for s in S],
    }
    lines = [f"bernstein element: {op!r}",
             "factor exponents: [" + ", ".join(str(m) for m in exps) + "]"]
    return EXIT_OK, {"result": result}, lines


def _run_canonical(docs: Sequence[Document], grid: Optional[str]):
    doc = docs[0]
    if not isinstance(doc, ThemeDocument):
        raise ParseError("canonical expects a theme document")
    point = _single_point(doc, grid)
    E = doc.presentation(point)
    inv = FundamentalInvariants(doc.lambda1, doc.p)
    space = canonical_space(inv)
    member = True
    try:
        coeffs = []
        for j in range(1, E.k):
            series = E.relation(j)
            if series.constant_term() != 1:
                raise NotNormalized("relation series must have constant term 1")
            coeffs.append({m: c for m, c in enumerate(series.coeffs())
                           if m > 0 and c != 0})
        canonical_point(inv, coeffs)
    except ThemeLabError:
        member = False
    result: dict = {
        "shape": space.shape,
        "supports": [list(s) for s in space.supports],
        "q": list(space.q),
        "torus_dim": space.torus_dim,
        "affine_dim": space.affine_dim,
        "member": member,
    }
    inv_text = str(inv.lambda1)
    if inv.p:
        inv_text += "; " + ", ".join(str(x) for x in inv.p)
    lines = [f"canonical space S({inv_text}): shape {space.shape}"]
    for j, (sup, qj) in enumerate(zip(space.supports, space.q), start=1):
        sup_text = ", ".join(f"b^{m}" for m in sup)
        lines.append(f"  S_{j} support: {sup_text} (q_{j} = {qj})")
    lines.append(f"document relations lie in the space: "
                 f"{'yes' if member else 'no'}")
    if E.k == 2 and E.p[0] >= 1 and member:
        alpha = parameter_of_rank2(E)
        result["parameter"] = str(alpha)
        lines.append(f"rank-2 parameter: {alpha}")
    return EXIT_OK, {"result": result}, lines


_ENTRY_NAMES = "UVW"


def _entry_name(k: int, i: int) -> str:
    off = k - 1 - i
    return _ENTRY_NAMES[off] if off < len(_ENTRY_NAMES) else f"W{i}"


def _run_isom(docs: Sequence[Document], grid: Optional[str]):
    for doc in docs:
        if not isinstance(doc, ThemeDocument):
            raise ParseError("isom expects two theme documents")
    E = docs[0].presentation(_single_point(docs[0], None))
    Ep = docs[1].presentation(_single_point(docs[1], None))
    outcome = isomorphism_test(E, Ep)
    if isinstance(outcome, Distinguisher):
        result = {"status": "not-isomorphic", "reason": outcome.reason,
                  "relation": (str(outcome.relation)
                               if outcome.relation is not None else None)}
        lines = [f"not isomorphic: {outcome}"]
        return EXIT_OK, {"result": result}, lines
    assert isinstance(outcome, BasisChange)
    k = E.k
    witness = {}
    for i in range(k - 1, 0, -1):
        entry = outcome.top_entry(i)
        if not entry.is_zero():
            witness[_entry_name(k, i)] = entry.to_literal()
    eps = [[eps_j.component(i).to_literal() for i in range(1, k + 1)]
           for eps_j in outcome.eps]
    result = {"status": "isomorphic", "witness": witness, "eps": eps}
    if witness:
        summary = ", ".join(f"{n} = {witness[n]}" for n in sorted(witness))
        lines = [f"isomorphic, witness {summary}"]
    else:
        lines = ["isomorphic, identity basis change"]
    return EXIT_OK, {"result": result}, lines


def _run_invariance(docs: Sequence[Document], grid: Optional[str]):
    doc = docs[0]
    if not isinstance(doc, ThemeDocument):
        raise ParseError("invariance expects a theme document")
    E = doc.presentation(_single_point(doc, grid))
    try:
        witness = invariance_test(E)
    except Obstruction as exc:
        result = {"status": "not-invariant", "obstruction": str(exc),
                  "relations": [str(ev) for ev in (exc.relations or ())]}
        lines = [f"not invariant: {exc}"]
        for ev in exc.relations or ():
            lines.append(f"  {ev}")
        return EXIT_OK, {"result": result}, lines
    result = {
        "status": "invariant",
        "witness": witness.to_literal(),
        "witness_components": [witness.component(j).to_literal()
                               for j in range(1, E.k + 1)],
    }
    lines = [f"invariant, witness x = {witness.to_literal()}"]
    return EXIT_OK, {"result": result}, lines


def _run_scan(docs: Sequence[Document], grid: Optional[str]):
    doc = docs[0]
    pts = grid_points(doc, grid)
    entries = [(pt, _payload_at(doc, pt)) for pt in pts]
    want_invariance = (isinstance(doc, ThemeDocument)
                       and len(doc.p) + 1 >= 2)
    report = scan_family(entries, invariance=want_invariance)
    payload = {
        "points": [_point_payload(sp) for sp in report.points],
        "strata": [{
            "bernstein": ([str(m) for m in st.bernstein]
                          if st.bernstein is not None else None),
            "invariants": ({"lambda1": str(st.invariants.lambda1),
                            "p": list(st.invariants.p)}
                           if st.invariants is not None else None),
            "points": [{n: str(v) for n, v in sorted(pt.items())}
                       for pt in st.points],
        } for st in report.strata],
        "has_jump": report.has_jump,
    }
    lines = [_point_text(sp) for sp in report.points]
    if report.strata:
        lines.append("strata:")
        majority = max((len(st.points) for st in report.strata), default=0)
        for st in report.strata:
            exps = "[" + ", ".join(str(m) for m in st.bernstein) + "]"
            where = "; ".join(_fmt_point(pt) for pt in st.points)
            mark = ("  <- jump stratum"
                    if report.has_jump and len(st.points) < majority else "")
            lines.append(f"  bernstein {exps}: {where}{mark}")
    lines.append(f"jump detected: {'yes' if report.has_jump else 'no'}")
    return _scan_exit(report), payload, lines


_RUNNERS = {
    "invariants": _run_invariants,
    "bernstein": _run_bernstein,
    "canonical": _run_canonical,
    "isom": _run_isom,
    "invariance": _run_invariance,
    "scan": _run_scan,
}


# ---------------------------------------------------------------------------
# verify: re-check a previously emitted JSON report


def _verify(report: dict):
    command = report.get("command")
    if command not in _RUNNERS:
        raise ParseError(f"report has no verifiable command: {command!r}")
    raw_inputs = report.get("inputs")
    if not isinstance(raw_inputs, list) or not raw_inputs:
        raise ParseError("report carries no inline input documents")
    docs = [document_from_dict(d) for d in raw_inputs]
    grid = report.get("grid")

    if command == "invariance" and report["result"].get("status") == "invariant":
        E = docs[0].presentation(_single_point(docs[0], grid))
        comps = [parse_series(text, E.prec)
                 for text in report["result"]["witness_components"]]
        x = E.element(comps)
        if report["result"].get("witness") != x.to_literal():
            return EXIT_PARSE, ["verification failed: witness literal "
                                "disagrees with its components"]
        if not x.component(E.k).is_zero() or (
                E.k > 1 and x.component(E.k - 1).is_zero()):
            return EXIT_PARSE, ["verification failed: witness is not in "
                                "the expected filtration step"]
        if not E.residual(x).is_zero():
            return EXIT_PARSE, ["verification failed: witness residual "
                                "does not vanish"]
        return EXIT_OK, ["verified: invariance witness re-checked exactly"]

    if command == "isom" and report["result"].get("status") == "isomorphic":
        E = docs[0].presentation(_single_point(docs[0], None))
        Ep = docs[1].presentation(_single_point(docs[1], None))
        eps = tuple(
            E.element([parse_series(text, E.prec) for text in row])
            for row in report["result"]["eps"])
        change = BasisChange(E, Ep, eps)
        recorded = report["result"].get("witness", {})
        for i in range(1, E.k):
            entry = change.top_entry(i)
            name = _entry_name(E.k, i)
            want = None if entry.is_zero() else entry.to_literal()
            if recorded.get(name) != want:
                return EXIT_PARSE, ["verification failed: witness entry "
                                    f"{name} disagrees with eps"]
        if not change.verify():
            return EXIT_PARSE, ["verification failed: basis change does not "
                                "transform the relations"]
        return EXIT_OK, ["verified: isomorphism witness re-checked exactly"]

    code, payload, _ = _RUNNERS[command](docs, grid)
    recomputed = _canonical_json(payload)
    recorded = _canonical_json({key: report[key] for key in payload
                                if key in report})
    if recomputed != recorded:
        return EXIT_PARSE, ["verification failed: recomputation disagrees "
                            "with the recorded report"]
    return code, [f"verified: {command} report reproduced exactly"]


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run(spec: JobSpec) -> Tuple[int, str]:
    """Execute one job; returns (exit code, rendered report)."""
    if spec.prec is not None and spec.prec < 8:
        raise ParseError("--prec must be at least 8")
    if spec.command == "verify":
        try:
            with open(spec.inputs[0], "r", encoding="utf-8") as fh:
                report = json.load(fh)
        except OSError as exc:
            raise ParseError(f"cannot read {spec.inputs[0]}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON report: {exc}") from exc
        code, lines = _verify(report)
        return code, "\n".join(lines) + "\n"

    docs = [load_document(path, spec.prec) for path in spec.inputs]
    envelope: dict = {
        "command": spec.command,
        "inputs": [doc.to_dict() for doc in docs],
    }
    if spec.grid is not None:
        envelope["grid"] = spec.grid
    try:
        code, payload, lines = _RUNNERS[spec.command](docs, spec.grid)
    except Inconclusive as exc:
        envelope["result"] = {"status": "inconclusive", "detail": str(exc)}
        text = (_canonical_json(envelope) if spec.json_output
                else f"inconclusive: {exc}\n")
        return EXIT_INCONCLUSIVE, text
    envelope.update(payload)
    if spec.json_output:
        return code, _canonical_json(envelope)
    return code, "\n".join(lines) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        spec = JobSpec(command=args.command, inputs=list(args.inputs),
                       prec=args.prec, json_output=args.json_output,
                       grid=getattr(args, "grid", None))
        code, text = run(spec)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except Inconclusive as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ThemeLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command line front end: ``valsem <command> INPUT.json [flags]``.

Exit status is 0 on success, 1 when a check fails and 2 on bad input.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .dualgraph import classify, to_dot
from .errors import ValidationError, ValsemError
from .poincare import (CurveMarking, alexander_general_curve, detect_polynomial, limit_profile,
                       poincare_acampo, vk_extend)
from .resolution import ResolutionModel, build_model, centers_from_json, restrict, validate_minimality
from .semigroup import SemigroupHandle, generating_sequence, maximal_contact, witness_json
from .series import expand
from .verify import hset_summary, run_suite

BUNDLED = {"paper_example.json"}


class ParseError(ValsemError, ValueError):
    pass


@dataclass
class InputDocument:
    raw: dict
    model: ResolutionModel
    marked: tuple[int, ...]
    arrows: dict[int, int] | None
    box: int | None
    kmax: int | None

    def curve(self) -> CurveMarking:
        if self.arrows is None:
            return CurveMarking(self.model, self.marked)
        branches = [a for a in self.marked for _ in range(self.arrows.get(a, 0))]
        return CurveMarking(self.model, branches)


def load_text(path: str) -> str:
    p = Path(path)
    if not p.exists() and p.name in BUNDLED:
        # the worked example ships with the package
        return resources.files("valsem").joinpath("data", p.name).read_text()
    try:
        return p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def parse_document(text: str) -> InputDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict) or "centers" not in raw or "marked" not in raw:
        raise ParseError("input must be an object with 'centers' and 'marked'")
    model = build_model(centers_from_json(raw["centers"]))
    marked = raw["marked"]
    if not isinstance(marked, list) or not marked or not all(isinstance(a, int) for a in marked):
        raise ValidationError("'marked' must be a nonempty list of vertex ids")
    if len(set(marked)) != len(marked):
        raise ValidationError("'marked' vertices must be distinct")
    for a in marked:
        model.check_vertex(a)
    arrows = None
    if "arrows" in raw:
        try:
            arrows = {int(k): int(v) for k, v in raw["arrows"].items()}
        except (AttributeError, ValueError) as exc:
            raise ValidationError("'arrows' must map vertex ids to counts") from exc
        if not set(arrows) <= set(marked) or any(v < 0 for v in arrows.values()) or not sum(arrows.values()):
            raise ValidationError("'arrows' must be supported on 'marked' with nonnegative counts")
    return InputDocument(raw, model, tuple(marked), arrows, raw.get("box"), raw.get("kmax"))


def digest(raw: dict, flags: dict) -> str:
    blob = json.dumps({"input": raw, "flags": flags}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def parse_vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad vector {text!r}; expected comma separated integers") from exc


def _uniform(n: int, r: int) -> tuple[int, ...]:
    return (n,) * r


# -- commands ------------------------------------------------------------------

def cmd_model(doc: InputDocument, args) -> tuple[dict, list]:
    rep = validate_minimality(doc.model, doc.marked)
    return {
        "s": doc.model.s,
        "centers": [c.to_json() for c in doc.model.centers],
        "M": [list(r) for r in doc.model.M],
        "A": [list(r) for r in doc.model.A],
        "projected": {str(v): list(doc.model.projected_row(v, doc.marked)) for v in doc.model.vertices},
        "minimal": rep.ok,
        "offending": list(rep.offending),
    }, []


def cmd_graph(doc: InputDocument, args) -> tuple[dict, list]:
    g = classify(doc.model)
    if args.format == "dot":
        return {"dot": to_dot(g, doc.marked, doc.arrows)}, []
    return {
        "edges": sorted([sorted(e) for e in doc.model.edges]),
        "deadEnds": sorted(g.dead_ends),
        "stars": sorted(g.stars),
        **hset_summary(doc.model, doc.marked),
    }, []


def cmd_semigroup(doc: InputDocument, args) -> tuple[dict, list]:
    h = SemigroupHandle(doc.model, doc.marked)
    if args.member is not None:
        m = parse_vector(args.member)
        lam = h.member(m)
        return {"m": list(m), "member": lam is not None, **(witness_json(lam) if lam else {})}, []
    if args.decompose is not None:
        m = parse_vector(args.decompose)
        return {"m": list(m), **h.decompose(m).to_json()}, []
    if args.contact:
        out = {}
        for a in doc.marked:
            sub, relabel = restrict(doc.model, [a])
            data = maximal_contact(sub, relabel[a]).to_json()
            back = {new: old for old, new in relabel.items()}
            data["deadEnds"] = [back[v] for v in data["deadEnds"]]
            out[str(a)] = data
        return {"contact": out}, []
    return {
        "generators": {str(v): list(b) for v, b in h.h_values().items()},
        "markedB": [list(b) for b in h.markedB],
        "generatingSequence": generating_sequence(doc.model, doc.marked),
    }, []


def cmd_poincare(doc: InputDocument, args) -> tuple[dict, list]:
    pv = poincare_acampo(doc.model, doc.marked)
    if args.expand:
        box = _uniform(args.box, len(doc.marked))
        return {"box": list(box), "series": expand(pv, box).to_json()}, []
    return {"factors": pv.to_json(), "text": str(pv)}, []


def cmd_curve(doc: InputDocument, args) -> tuple[dict, list]:
    curve = doc.curve()
    box = _uniform(args.box, curve.r)
    if args.vk is not None:
        ext = vk_extend(curve, args.vk)
        return {"k": ext.k, "s": ext.model.s, "marked": list(ext.marked),
                "markedB": [list(b) for b in ext.markedB], "deadEnds": sorted(ext.dead_ends),
                "centers": [c.to_json() for c in ext.model.centers]}, []
    if args.limit:
        prof = limit_profile(curve, box, args.kmax)
        return {"box": list(box), "counts": {str(k): v for k, v in prof.counts.items()},
                "k0": prof.k0, "monotone": prof.monotone,
                "status": "converged" if prof.converged else "NoConvergenceWithinKmax"}, []
    pc = alexander_general_curve(curve)
    poly = detect_polynomial(pc, box)
    return {"factors": pc.to_json(), "text": str(pc), "box": list(box),
            "polynomial": poly.polynomial,
            "degree": list(poly.degree) if poly.degree else None,
            "generatingSequence": generating_sequence(doc.model, curve.marked, curve=True)}, []


def cmd_verify(doc: InputDocument, args) -> tuple[dict, list]:
    box = _uniform(args.box, len(doc.marked))
    reports = run_suite(doc.model, doc.marked, box, args.kmax)
    return {"box": list(box)}, [r.to_json() for r in reports]


COMMANDS = {
    "model": cmd_model,
    "graph": cmd_graph,
    "semigroup": cmd_semigroup,
    "poincare": cmd_poincare,
    "curve": cmd_curve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="valsem", description="Value semigroups and Poincare series of divisorial valuations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("input", help="JSON input document")
        p.add_argument("--box", type=int, default=None, help="per-coordinate truncation (default 24)")
        p.add_argument("--kmax", type=int, default=None, help="tower depth (default 3)")
        p.add_argument("--format", choices=["json", "text", "dot"], default="json")
        return p

    common(sub.add_parser("model", help="intersection and value matrices"))
    common(sub.add_parser("graph", help="dual graph classification"))
    p = common(sub.add_parser("semigroup", help="semigroup of values"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--generators", action="store_true")
    g.add_argument("--member", metavar="a,b,c")
    g.add_argument("--decompose", metavar="a,b,c")
    g.add_argument("--contact", action="store_true")
    p = common(sub.add_parser("poincare", help="Poincare series of the valuations"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rational", action="store_true")
    g.add_argument("--expand", action="store_true")
    p = common(sub.add_parser("curve", help="general curve through the marked divisors"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alexander", action="store_true")
    g.add_argument("--vk", type=int, metavar="K")
    g.add_argument("--limit", action="store_true")
    common(sub.add_parser("verify", help="run the identity suite"))
    return ap


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}", f"digest: {report['inputsDigest']}"]
    for key, val in report["results"].items():
        lines.append(f"{key}: {json.dumps(val, sort_keys=True)}")
    if report["checks"]:
        width = max(len(c["name"]) for c in report["checks"])
        for c in report["checks"]:
            extra = f"  first discrepancy at {c['firstDiscrepancy']['m']}" if "firstDiscrepancy" in c else ""
            lines.append(f"  {c['name']:<{width}}  {c['status']}{extra}")
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        doc = parse_document(load_text(args.input))
        if args.box is None:
            args.box = int(doc.box or 24)
        if args.kmax is None:
            args.kmax = int(doc.kmax or 3)
        flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("input", "format")}
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results, checks = COMMANDS[args.command](doc, args)
    except (ValidationError, ParseError, ValueError) as exc:
        print(f"valsem: input error: {exc}", file=sys.stderr)
        return 2
    except ValsemError as exc:
        print(f"valsem: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "inputsDigest": digest(doc.raw, flags),
        "results": results,
        "checks": checks,
        "warnings": sorted({str(w.message) for w in caught}),
    }
    if args.format == "dot" and "dot" in results:
        out.write(results["dot"])
    elif args.format == "text":
        out.write(render_text(report))
    else:
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 1 if any(c["status"] == "fail" for c in checks) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

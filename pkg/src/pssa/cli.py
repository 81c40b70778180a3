"""Command line front end.

Exit codes: 0 on success, 2 for invalid input, 3 for numerically degenerate
input. Diagnostics go to stderr; reports and CSV go to ``--output`` or stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, grassmann, io, plotdata, polysphere, report, sphere, synth, torus, tree
from .config import PssaConfig
from .errors import NumericalError, ValidationError

log = logging.getLogger("pssa")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> PssaConfig:
    return PssaConfig(
        max_children_per_node=getattr(args, "max_children", 3),
        resonance_bound=args.resonance_bound,
        min_dim=getattr(args, "min_dim", 0),
        selection=args.selection,
        seed=args.seed,
        point_fallback=getattr(args, "point_fallback", "antipodal"),
        allow_sphere_to_point=getattr(args, "allow_sphere_to_point", False),
    )


def _run_info(args) -> dict:
    digest = hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
    return {"command": args.command, "input_sha256": digest, "renormalize": args.renormalize}


def _load(args) -> io.Dataset:
    ds = io.read_dataset(args.input, args.manifold)
    if ds.manifold == "sphere" and args.renormalize:
        ds.data = sphere.check_unit_columns(ds.data.T, renormalize=True).T
    elif ds.manifold == "polysphere" and args.renormalize:
        ds.data = polysphere.check_polysphere_data(ds.data, renormalize=True)
    return ds


def _node(descriptor, dim, model, fit_error, loo_error=None) -> dict:
    return {"descriptor": descriptor, "dim": dim, "model": model, "fit_error": fit_error,
            "loo_error": loo_error, "warning": None, "children": []}


def fit_models(ds: io.Dataset, config: PssaConfig, relations: int = 1, top: int = 10) -> list[dict]:
    """Fit-report entries for a dataset, in ranking order."""
    X = ds.fit_input()
    if ds.manifold == "sphere":
        n = X.shape[0] - 1
        return [
            _node({"type": "sphere", "n": m.dim}, m.dim,
                  {"kind": "subsphere", "basis": m.subspace, "complement": m.complement,
                   "singular_values": m.singular_values}, m.total_error)
            for m in sphere.sphere_pssa_chain(X, include_point=True)
        ] if n >= 1 else []
    if ds.manifold == "grassmannian":
        out = []
        for m in grassmann.grassmann_pssa_chain(X):
            out.append(_node({"type": "grassmannian", "k": m.plane_dim, "n": m.ambient_dim - m.codim}, m.dim,
                             {"kind": "subgrassmannian", "basis": m.subspace, "complement": m.complement,
                              "singular_values": m.singular_values}, m.total_error))
        return out
    if ds.manifold == "torus":
        n = X.shape[1]
        cands = torus.enumerate_resonances(n, relations, config.resonance_bound)
        if config.selection == "loo":
            ranked = [r.A for r in torus.loo_model_selection(X, cands)]
        else:
            ranked = sorted(cands, key=lambda A: (torus.fit_subtorus(X, A).mean_error,
                                                  torus.lattice.canonical_form(A.tolist())))
        out = []
        for A in ranked[:top]:
            m = torus.fit_subtorus(X, A)
            try:
                e = torus.loo_errors(X, A)
                m.loo_error = float(np.sqrt(np.mean(e**2)))
            except NumericalError:
                m.loo_error = None
            desc = {"type": "torus", "n": m.dim} if m.dim else {"type": "point"}
            out.append(_node(desc, m.dim, tree.torus_model_dict(m), m.total_error, m.loo_error))
        return out
    templates = polysphere.enumerate_polysphere_models(X.shape[1], config)
    scored = []
    for t in templates:
        try:
            m = polysphere.fit_polysphere_model(X, t, config)
            m.loo_error = polysphere.polysphere_loo_error(X, t, config) if X.shape[0] > 1 else None
        except NumericalError as exc:
            log.warning("template %s skipped: %s", t.label, exc)
            continue
        score = m.loo_error if config.selection == "loo" and m.loo_error is not None else m.total_error
        scored.append((-m.dim, score, t.label, [s.describe() for s in m.state.steps], m))
    scored.sort(key=lambda item: item[:4])
    out = []
    for *_, m in scored:
        desc = {"type": "product", "label": m.label} if m.dim else {"type": "point"}
        out.append(_node(desc, m.dim, tree.polysphere_model_dict(m), m.total_error, m.loo_error))
    return out


def cmd_fit(args) -> int:
    ds = _load(args)
    config = _config(args)
    models = fit_models(ds, config, relations=args.relations, top=args.top)
    doc = report.document("fit", ds.descriptor.to_dict(), config, _run_info(args), models=models)
    _emit(report.dumps(doc), args.output)
    return EXIT_OK


def cmd_tree(args) -> int:
    ds = _load(args)
    config = _config(args)
    root = tree.build_tree(ds.fit_input(), ds.descriptor, config)
    doc = tree.serialize_tree(root, ds.descriptor, config, _run_info(args))
    _emit(report.dumps(doc), args.output)
    return EXIT_OK


def cmd_synth(args) -> int:
    manifold, data, params = synth.generate(args.example, args.seed)
    params = {k: json.dumps(report.plain(v), separators=(",", ":")) for k, v in params.items()}
    if args.output and args.output.endswith(".json"):
        text = io.dumps_json(manifold, data, params)
    else:
        text = io.dumps_csv(manifold, data, params)
    _emit(text, args.output)
    return EXIT_OK


def cmd_plotdata(args) -> int:
    import jsonschema

    text = Path(args.report).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
        report.validate(doc)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"report is not JSON: {exc}") from None
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"report does not match the schema: {exc.message}") from None
    data = None
    if args.input:
        data = io.read_dataset(args.input, doc["manifold"]["type"]).data
    header, rows = plotdata.section(doc, args.what, data)
    _emit(plotdata.to_csv(header, rows), args.output)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifold", choices=io.MANIFOLDS, help="overrides the dataset header")
    p.add_argument("--input", required=True, help="dataset file (.csv or .json)")
    p.add_argument("--output", help="report path (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resonance-bound", type=int, default=10)
    p.add_argument("--selection", choices=("loo", "training"), default="loo")
    p.add_argument("--renormalize", action="store_true", help="rescale sphere data to unit norm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pssa", description="Nested best-fit geodesic submanifolds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one model family and rank the candidates")
    _add_common(p)
    p.add_argument("--relations", type=int, default=1, help="torus: number of resonance relations")
    p.add_argument("--top", type=int, default=10, help="torus: number of ranked candidates to report")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("tree", help="build the tree of nested approximations")
    _add_common(p)
    p.add_argument("--max-children", type=int, default=3)
    p.add_argument("--min-dim", type=int, default=0)
    p.add_argument("--point-fallback", choices=("antipodal", "mean"), default="antipodal")
    p.add_argument("--allow-sphere-to-point", action="store_true")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("example", help=f"one of: {', '.join(synth.EXAMPLES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="dataset path (default: stdout, CSV)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plotdata", help="sample fitted curves from a report as CSV")
    p.add_argument("--report", required=True)
    p.add_argument("--what", required=True, help=f"one of: {', '.join(plotdata.SECTIONS)}")
    p.add_argument("--input", help="dataset, needed for the projections section")
    p.add_argument("--output")
    p.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    seed = getattr(args, "seed", 0)
    if not 0 <= seed < 2**64:
        print("error: seed must be a 64-bit unsigned integer", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

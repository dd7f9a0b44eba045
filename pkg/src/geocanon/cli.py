"""Command-line interface.

Subcommands: iso (graph isomorphism), canon (canonical digest),
equivariance (randomized property harness), bench (complexity
measurement), gen (corpus/tetrahedron dataset dump).

Exit codes: 0 success/true, 1 definitive-false, 2 input error,
3 method-inapplicable.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import corpus
from .basis import egnn_cpl_forward
from .canonical import (
    CoplanarVirtualNodesError,
    color_nodes,
    fast_canonical_form,
    general_canonical_form,
    generate_virtual_nodes,
)
from .graph import (
    GeometricGraph,
    apply_transform,
    complete_graph,
    random_permutation,
    random_transform,
)
from .isomorphism import DegenerateGraphError, geometric_graph_isomorphic

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_INAPPLICABLE = 3

VIOLATION_LIMIT = 1e-7


def _load_graph(path):
    try:
        return GeometricGraph.from_json(path)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
        raise SystemExit(_fail(f"cannot read graph {path!r}: {e}"))


def _fail(msg):
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_iso(args):
    a = _load_graph(args.file_a)
    b = _load_graph(args.file_b)
    try:
        cert = geometric_graph_isomorphic(a, b, tol=args.tol)
    except DegenerateGraphError as e:
        return _fail(str(e))
    if cert is None:
        print("not isomorphic")
        return EXIT_FALSE
    print(json.dumps({
        "isomorphic": True,
        "permutation": cert.permutation.mapping.tolist(),
        "linear": cert.transform.linear.tolist(),
        "translation": cert.transform.translation.tolist(),
        "residual": cert.residual,
    }, indent=2))
    return EXIT_OK


def cmd_canon(args):
    g = _load_graph(args.file)
    try:
        if args.mode == "general":
            digest = general_canonical_form(g, tol=args.tol)
        else:
            coloring = None
            if args.coloring != "auto":
                coloring = color_nodes(g, args.coloring, tol=args.tol)
            digest = fast_canonical_form(g, tol=args.tol, coloring=coloring)
    except CoplanarVirtualNodesError as e:
        print(f"error: {e} (try --mode general)", file=sys.stderr)
        return EXIT_INAPPLICABLE
    except DegenerateGraphError as e:
        return _fail(str(e))
    print(digest.combined)
    if args.verbose:
        print(json.dumps({
            "mode": digest.mode,
            "gram_block": list(digest.gram_block),
            "node_digest": digest.node_digest,
            "edge_digest": digest.edge_digest,
            "n_quads": digest.n_quads,
            "n_skipped": digest.n_skipped,
        }, indent=2), file=sys.stderr)
    return EXIT_OK


def cmd_equivariance(args):
    g = _load_graph(args.file)
    if args.trials == 0:
        print("warning: 0 trials requested; trivially passing", file=sys.stderr)
        print("PASS (vacuous)")
        return EXIT_OK
    violations = _equivariance_violations(g, args.trials, args.seed,
                                          args.inject_scale)
    worst = 0.0
    for name, v in sorted(violations.items()):
        status = "ok" if v < VIOLATION_LIMIT else "VIOLATION"
        print(f"{name}: max violation {v:.3e} [{status}]")
        worst = max(worst, v)
    if worst > VIOLATION_LIMIT:
        print("FAIL")
        return EXIT_FALSE
    print("PASS")
    return EXIT_OK


def _equivariance_violations(g, trials, seed, inject_scale=1.0):
    """Max deviation per registered operation over random group actions."""
    out = {}
    base_general = None
    try:
        base_general = general_canonical_form(g)
        out["general_digest_invariance"] = 0.0
    except DegenerateGraphError:
        pass
    base_fast = None
    try:
        base_fast = fast_canonical_form(g)
        out["fast_digest_invariance"] = 0.0
    except (CoplanarVirtualNodesError, DegenerateGraphError):
        pass
    base_col = np.sort(color_nodes(g, "center").values, axis=0)
    out["coloring_invariance"] = 0.0
    coloring = color_nodes(g, "center")
    base_vn = generate_virtual_nodes(g, coloring)
    out["virtual_node_equivariance"] = 0.0
    y0, _ = egnn_cpl_forward(g, coloring)
    out["layer_forward_equivariance"] = 0.0
    for k in range(trials):
        t = random_transform(seed + k, allow_reflection=True)
        if inject_scale != 1.0:
            t = type(t)(t.linear, t.translation)
            lin = t.linear * inject_scale
            t = _ScaledTransform(lin, t.translation)
        p = random_permutation(seed + k + 1, g.n_nodes)
        gt = apply_transform(g, t, p)
        if base_general is not None:
            d = general_canonical_form(gt)
            out["general_digest_invariance"] = max(
                out["general_digest_invariance"],
                0.0 if d == base_general else 1.0)
        if base_fast is not None:
            try:
                d = fast_canonical_form(gt)
                bad = 0.0 if d == base_fast else 1.0
            except CoplanarVirtualNodesError:
                bad = 1.0
            out["fast_digest_invariance"] = max(
                out["fast_digest_invariance"], bad)
        ct = color_nodes(gt, "center")
        out["coloring_invariance"] = max(
            out["coloring_invariance"],
            float(np.abs(np.sort(ct.values, axis=0) - base_col).max()))
        vt = generate_virtual_nodes(gt, ct)
        out["virtual_node_equivariance"] = max(
            out["virtual_node_equivariance"],
            float(np.abs(vt.z - t.apply(base_vn.z)).max()))
        yt, _ = egnn_cpl_forward(gt, ct)
        out["layer_forward_equivariance"] = max(
            out["layer_forward_equivariance"],
            float(np.abs(yt - t.apply(y0)[p.mapping]).max()))
    return out


class _ScaledTransform:
    """Deliberately broken transform used by the detector sanity check."""

    def __init__(self, linear, translation):
        self.linear = linear
        self.translation = translation

    def apply(self, x):
        return np.asarray(x, dtype=float) @ self.linear.T + self.translation


def _random_dense_graph(n, seed):
    rng = np.random.default_rng(seed)
    return complete_graph(rng.normal(size=(n, 1)), rng.normal(size=(n, 3)) * 3.0)


def _fit_slope(ns, ts):
    return float(np.polyfit(np.log(ns), np.log(ts), 1)[0])


def cmd_bench(args):
    reps = max(args.reps, 3)
    sizes = [int(s) for s in args.sizes.split(",")]
    modes = ["fast", "general"] if args.mode == "both" else [args.mode]
    limits = {"fast": 1024, "general": 16}
    rows = []
    print("algorithm,N,seconds")
    for mode in modes:
        ns, ts = [], []
        for n in sizes:
            if n > limits[mode]:
                print(f"error: N={n} exceeds limit {limits[mode]} for "
                      f"{mode} mode", file=sys.stderr)
                return EXIT_INPUT
            g = _random_dense_graph(n, args.seed + n)
            if mode == "fast":
                coloring = color_nodes(g, "center")
                fn = lambda: fast_canonical_form(g, coloring=coloring)
            else:
                fn = lambda: general_canonical_form(g)
            fn()  # warm up caches
            samples = []
            for _ in range(reps):
                t0 = time.perf_counter()
                fn()
                samples.append(time.perf_counter() - t0)
            med = float(np.median(samples))
            print(f"{mode},{n},{med:.6f}")
            ns.append(n)
            ts.append(med)
        if len(ns) >= 2:
            print(f"# slope[{mode}] = {_fit_slope(ns, ts):.2f}",
                  file=sys.stderr)
        rows.append((mode, ns, ts))
    return EXIT_OK


def cmd_gen(args):
    os.makedirs(args.out, exist_ok=True)
    manifest = {"pairs": [], "graphs": [], "tetrahedra": []}
    if args.what == "corpus":
        pairs = [
            corpus.four_body_nonchiral_pair(args.seed),
            corpus.four_body_chiral_pair(),
            *corpus.chirality_graphs(args.seed),
        ]
        for k, pair in enumerate(pairs):
            fa = f"{pair.source}_a.json"
            fb = f"{pair.source}_b.json"
            pair.first.to_json(os.path.join(args.out, fa))
            pair.second.to_json(os.path.join(args.out, fb))
            manifest["pairs"].append({
                "a": fa, "b": fb,
                "isomorphic": pair.ground_truth_isomorphic,
                "source": pair.source,
            })
        singles = {
            "square_cone": corpus.square_cone(),
            "unit_circle": corpus.unit_circle_counterexample(args.seed),
        }
        for name, g in singles.items():
            fn = f"{name}.json"
            g.to_json(os.path.join(args.out, fn))
            manifest["graphs"].append({"file": fn, "source": name})
    elif args.what == "tetra":
        for k in range(args.count):
            s = corpus.random_tetrahedron(args.seed + k)
            g = complete_graph(np.ones((4, 1)), s.vertices)
            fn = f"tetra_{k:05d}.json"
            g.to_json(os.path.join(args.out, fn))
            manifest["tetrahedra"].append({
                "file": fn,
                "monge": s.monge.tolist(),
                "twelve_point": s.twelve_point.tolist(),
                "incenter": s.incenter.tolist(),
                "circumradius": s.circumradius,
            })
    else:
        return _fail(f"unknown target {args.what!r}")
    with open(os.path.join(args.out, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {args.out}/manifest.json")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="geocanon",
        description="Geometric-graph isomorphism, canonical forms, and "
                    "equivariance testing",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iso", help="test two graph files for isomorphism")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("canon", help="print the canonical digest of a graph")
    p.add_argument("file")
    p.add_argument("--mode", choices=["general", "fast"], default="general")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--coloring", choices=["auto", "none", "center", "tensor"],
                   default="auto")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("equivariance",
                       help="randomized invariance/equivariance harness")
    p.add_argument("file")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-scale", type=float, default=1.0,
                   help=argparse.SUPPRESS)  # detector sanity check
    p.set_defaults(func=cmd_equivariance)

    p = sub.add_parser("bench", help="runtime scaling of the canonical forms")
    p.add_argument("--sizes", default="64,128,256,512")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--mode", choices=["fast", "general", "both"],
                   default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="write corpus or tetrahedron datasets")
    p.add_argument("--what", choices=["corpus", "tetra"], required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    sshg tokens      <file>          per-chain secondary-structure strings
    sshg build       <file>          hierarchical graph as JSON
    sshg stats       <files...>      edge counts vs radius-graph baselines
    sshg verify      <file>          rigid-motion invariance self-check
    sshg fingerprint <files...>      128-bit pose-invariant fingerprints

Exit codes: 0 success, 1 partial failure, 2 parse error, 3 degenerate
geometry, 4 invariance violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .dssp import assign_tokens, token_string
from .geometry import (
    DegenerateConfiguration,
    DegeneratePoint,
    PointCloud,
    random_rigid_motion,
)
from .hierarchy import BuildError, build_hierarchy, total_edges
from .pdbio import EmptyStructure, MalformedRecord, estimate_hydrogens, parse_pdb, transform_chain
from .schull import DuplicateDirection, radius_graph
from .serialize import compare_invariant, doc_to_json, hierarchy_to_doc, round_sig
from .wlref import fingerprint

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_INVARIANCE = 4

_DEGENERATE_ERRORS = (DegeneratePoint, DuplicateDirection, DegenerateConfiguration)
_MAX_WORKERS = 8


def _read_structure(path: str):
    if path == "-":
        text = sys.stdin.read()
        return parse_pdb(text, source_id="<stdin>")
    return parse_pdb(Path(path).read_text(), source_id=path)


def _select_chains(parsed, chain_id):
    if chain_id is None:
        return parsed.chains
    matches = [ch for ch in parsed.chains if ch.chain_id == chain_id]
    if not matches:
        raise EmptyStructure(f"{parsed.source_id}: no chain {chain_id!r}")
    return tuple(matches)


def _degeneracy_cause(exc: Exception) -> bool:
    while exc is not None:
        if isinstance(exc, _DEGENERATE_ERRORS):
            return True
        exc = exc.__cause__
    return False


def cmd_tokens(args) -> int:
    try:
        parsed = _read_structure(args.input)
        chains = _select_chains(parsed, args.chain)
        for chain in chains:
            toks = assign_tokens(estimate_hydrogens(chain))
            print(f"{chain.chain_id} {token_string(toks)}")
    except (MalformedRecord, EmptyStructure, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if parsed.dropped_residues:
        print(f"warning: dropped {parsed.dropped_residues} incomplete residue(s)",
              file=sys.stderr)
    return EXIT_OK


def cmd_build(args) -> int:
    jitter = args.jitter == "on"
    try:
        parsed = _read_structure(args.input)
        chain = _select_chains(parsed, args.chain)[0]
    except (MalformedRecord, EmptyStructure, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        h = build_hierarchy(estimate_hydrogens(chain), jitter=jitter)
    except (BuildError, ValueError) as exc:
        if _degeneracy_cause(exc):
            print(f"error: degenerate geometry: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        raise
    text = doc_to_json(hierarchy_to_doc(h, jitter=jitter))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _stats_row(path: str, cutoffs: list[float]):
    parsed = _read_structure(path)
    rows = []
    for chain in parsed.chains:
        h = build_hierarchy(estimate_hydrogens(chain))
        audit = total_edges(h)
        sshg_edges = audit.inter + audit.intra_sum
        cloud = PointCloud(chain.ca_coords())
        radius_edges = {c: radius_graph(cloud, c).n_edges for c in cutoffs}
        rows.append({
            "id": chain.source_id,
            "N": len(chain),
            "I": len(h.intra),
            "inter_edges": audit.inter,
            "intra_edges_sum": audit.intra_sum,
            "sshg_edges": sshg_edges,
            "bound_3N": 3 * len(chain),
            "bound_ok": audit.bound_ok,
            "radius_edges": radius_edges,
            "edge_ratio": {
                c: (radius_edges[c] / sshg_edges if sshg_edges else float("nan"))
                for c in cutoffs
            },
        })
    return rows


def _aggregate(rows, cutoffs):
    if not rows:
        return {}
    mean = lambda xs: round_sig(sum(xs) / len(rows))
    return {
        "structures": len(rows),
        "mean_sshg_edges": mean([r["sshg_edges"] for r in rows]),
        "mean_radius_edges": {c: mean([r["radius_edges"][c] for r in rows]) for c in cutoffs},
        "mean_edge_ratio": {c: mean([r["edge_ratio"][c] for r in rows]) for c in cutoffs},
    }


def _stats_table(rows, aggregate, cutoffs) -> str:
    headers = ["id", "N", "I", "sshg", "3N"] + \
              [f"r@{c:g}" for c in cutoffs] + [f"ratio@{c:g}" for c in cutoffs]
    lines = ["\t".join(headers)]
    for r in rows:
        cells = [r["id"], str(r["N"]), str(r["I"]), str(r["sshg_edges"]), str(r["bound_3N"])]
        cells += [str(r["radius_edges"][c]) for c in cutoffs]
        cells += [f"{r['edge_ratio'][c]:.3f}" for c in cutoffs]
        lines.append("\t".join(cells))
    if aggregate:
        cells = ["mean", "", "", f"{aggregate['mean_sshg_edges']:g}", ""]
        cells += [f"{aggregate['mean_radius_edges'][c]:g}" for c in cutoffs]
        cells += [f"{aggregate['mean_edge_ratio'][c]:.3f}" for c in cutoffs]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _write_report(report_dir: str, rows, aggregate, cutoffs):
    """Write the delimited stats table plus comparison figures."""
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "stats.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["id", "N", "I", "inter_edges", "intra_edges_sum", "sshg_edges",
                  "bound_3N", "bound_ok"]
        header += [f"radius_edges@{c:g}" for c in cutoffs]
        header += [f"edge_ratio@{c:g}" for c in cutoffs]
        writer.writerow(header)
        for r in rows:
            row = [r["id"], r["N"], r["I"], r["inter_edges"], r["intra_edges_sum"],
                   r["sshg_edges"], r["bound_3N"], r["bound_ok"]]
            row += [r["radius_edges"][c] for c in cutoffs]
            row += [f"{r['edge_ratio'][c]:.6f}" for c in cutoffs]
            writer.writerow(row)
    if not cutoffs or not rows:
        return
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for r in rows:
        ax.plot(cutoffs, [r["radius_edges"][c] for c in cutoffs],
                marker="o", alpha=0.6, label=r["id"])
    ax.axhline(aggregate["mean_sshg_edges"], color="black", linestyle="--",
               label="hierarchical (mean)")
    ax.set_xlabel("radius cutoff (A)")
    ax.set_ylabel("edges")
    ax.set_title("Radius-graph edge counts vs hierarchical construction")
    if len(rows) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out / "edges_vs_cutoff.png", dpi=150)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ratios = [aggregate["mean_edge_ratio"][c] for c in cutoffs]
    ax.bar([f"{c:g}" for c in cutoffs], ratios, color="#4878a8")
    ax.axhline(1.0, color="black", linewidth=0.8)
    ax.set_xlabel("radius cutoff (A)")
    ax.set_ylabel("radius edges / hierarchical edges")
    ax.set_title("Mean edge ratio by cutoff")
    fig.tight_layout()
    fig.savefig(out / "edge_ratio.png", dpi=150)
    plt.close(fig)


def cmd_stats(args) -> int:
    cutoffs = [float(c) for c in args.cutoffs.split(",") if c.strip()] \
        if args.cutoffs else []
    rows, failures = [], []
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, max(1, len(args.inputs)))) as pool:
        results = pool.map(
            lambda p: (p, _try_stats(p, cutoffs)), args.inputs)
        for path, (chain_rows, error) in results:
            if error is not None:
                failures.append((path, error))
                print(f"error: {path}: {error}", file=sys.stderr)
            else:
                rows.extend(chain_rows)
    aggregate = _aggregate(rows, cutoffs)
    if args.report:
        _write_report(args.report, rows, aggregate, cutoffs)
    if args.format == "json":
        doc = {"cutoffs": cutoffs, "structures": rows, "aggregate": aggregate}
        sys.stdout.write(json.dumps(doc, indent=2, default=float) + "\n")
    else:
        sys.stdout.write(_stats_table(rows, aggregate, cutoffs))
    return EXIT_PARTIAL if failures else EXIT_OK


def _try_stats(path, cutoffs):
    try:
        return _stats_row(path, cutoffs), None
    except Exception as exc:
        return None, f"{type(exc).__name__}: {exc}"


def cmd_verify(args) -> int:
    try:
        parsed = _read_structure(args.input)
        chain = _select_chains(parsed, args.chain)[0]
    except (MalformedRecord, EmptyStructure, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        base = build_hierarchy(estimate_hydrogens(chain))
    except (BuildError, ValueError) as exc:
        if _degeneracy_cause(exc):
            print(f"error: degenerate geometry: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        raise
    base_doc = hierarchy_to_doc(base)
    base_fp = fingerprint(base)
    if args.corrupt:
        # Self-test hook: damage one stored attribute so the comparison must fail.
        if base_doc["intra"][0]["edges"]:
            base_doc["intra"][0]["edges"][0][2] += 1e-3
        else:
            base_doc["intra"][0]["nodes"][0][3] += 1e-3
    rng = np.random.default_rng(args.seed)
    violations = 0
    for trial in range(args.trials):
        motion = random_rigid_motion(rng)
        moved = build_hierarchy(estimate_hydrogens(transform_chain(chain, motion)))
        problems = compare_invariant(base_doc, hierarchy_to_doc(moved), tol=1e-6)
        fp_ok = fingerprint(moved) == base_fp
        audit_ok = total_edges(moved) == total_edges(base)
        if problems or not fp_ok or not audit_ok:
            violations += 1
            record = {
                "trial": trial,
                "rotation": [[round_sig(v) for v in row] for row in motion.rotation],
                "translation": [round_sig(v) for v in motion.translation],
                "det": round_sig(motion.det),
                "fingerprint_match": fp_ok,
                "audit_match": audit_ok,
                "attribute_mismatches": problems[:10],
            }
            print("violation: " + json.dumps(record), file=sys.stderr)
    status = "ok" if violations == 0 else "FAIL"
    print(f"verify {chain.source_id}: trials={args.trials} violations={violations} "
          f"fingerprint={base_fp.hex} audit={tuple(total_edges(base))} {status}")
    return EXIT_OK if violations == 0 else EXIT_INVARIANCE


def cmd_fingerprint(args) -> int:
    def one(path):
        try:
            parsed = _read_structure(path)
            lines = []
            for chain in parsed.chains:
                h = build_hierarchy(estimate_hydrogens(chain))
                lines.append(f"{chain.source_id} {fingerprint(h).hex}")
            return lines, None
        except Exception as exc:
            return None, f"{type(exc).__name__}: {exc}"

    failed = False
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, max(1, len(args.inputs)))) as pool:
        for path, (lines, error) in zip(args.inputs, pool.map(one, args.inputs)):
            if error is not None:
                failed = True
                print(f"error: {path}: {error}", file=sys.stderr)
            else:
                for line in lines:
                    print(line)
    return EXIT_PARSE if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sshg",
        description="Secondary-structure hierarchical graphs from protein backbones.",
    )
    parser.add_argument("--version", action="version", version=f"sshg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokens", help="per-residue secondary-structure letters")
    p.add_argument("input", help="PDB file, or - for stdin")
    p.add_argument("--chain", help="restrict to one chain id")
    p.set_defaults(func=cmd_tokens)

    p = sub.add_parser("build", help="hierarchical graph as JSON")
    p.add_argument("input", help="PDB file, or - for stdin")
    p.add_argument("--chain", help="chain id (default: first chain)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--jitter", choices=("on", "off"), default="off",
                   help="rescue degenerate geometry with a deterministic 1e-7 A jitter")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("stats", help="edge counts vs radius-graph baselines")
    p.add_argument("inputs", nargs="+", help="PDB files")
    p.add_argument("--cutoffs", default="4,6,8,10,16",
                   help="comma-separated radius cutoffs in A (empty for none)")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--report", metavar="DIR",
                   help="write stats.csv and comparison figures into DIR")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("verify", help="rigid-motion invariance self-check")
    p.add_argument("input", help="PDB file, or - for stdin")
    p.add_argument("--chain", help="chain id (default: first chain)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fingerprint", help="pose-invariant structure fingerprints")
    p.add_argument("inputs", nargs="+", help="PDB files")
    p.set_defaults(func=cmd_fingerprint)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

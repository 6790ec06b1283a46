"""Command-line front end.

Subcommands compute a spectrum or one of the gap statistics for a graph
described by a JSON file and emit flat tables as CSV (default) or JSON.
CSV uses a comma separator, period decimals, a header row, LF endings,
and 15-significant-digit floats, so identical configurations reproduce
byte-identical output.  Exit status is 0 only when the run saw no bound
violations and no solver audits tripped; inapplicable bound entries are
written as NA.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .bounds import check_all, sensitivity_bound, shortest_edge_bound
from .eigenfunctions import sensitivity
from .errors import GraphSpectraError
from .graphs import RobinSpec, boundary_star_decomposition, load_graph_file
from .solver import compute_spectrum
from .stats import (
    accumulation_clusters,
    arctan_prediction,
    empirical_cdf,
    rng_sequence,
    running_average,
    sensitivity_prediction,
    theoretical_mean,
    weyl_moments,
)

HISTOGRAM_BINS = 50


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph_path: str
    sigma: float | None
    n_max: int | None
    k_max: float | None
    window: int
    out: str | None
    format: str
    step_scale: float
    tol: float | None

    @property
    def target_n(self) -> int:
        return self.n_max if self.n_max is not None else 2500


@dataclass
class Table:
    columns: list
    rows: list
    companions: dict
    violations: int = 0


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "NA" if np.isnan(value) else "{:.15g}".format(float(value))
    return str(value)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _json_ready(value):
    if value is None:
        return None
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if np.isnan(value) else float(value)
    return value


def _emit(table: Table, config: RunConfig) -> None:
    if config.format == "json":
        payload = {
            "columns": table.columns,
            "rows": [[_json_ready(x) for x in row] for row in table.rows],
        }
        for name, (cols, rows) in table.companions.items():
            payload[name] = {
                "columns": cols,
                "rows": [[_json_ready(x) for x in row] for row in rows],
            }
        text = json.dumps(payload, indent=2) + "\n"
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return

    text = _csv_text(table.columns, table.rows)
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        root, dot, ext = config.out.rpartition(".")
        base = root if dot else config.out
        suffix = "." + ext if dot else ""
        for name, (cols, rows) in table.companions.items():
            side = f"{base}.{name}{suffix}"
            with open(side, "w", encoding="utf-8", newline="") as fh:
                fh.write(_csv_text(cols, rows))
    else:
        sys.stdout.write(text)
        # companion tables only materialize with --out; stdout stays one table


def _load(config: RunConfig):
    graph, robin = load_graph_file(config.graph_path)
    if config.sigma is not None:
        robin = RobinSpec(robin.vertices, float(config.sigma))
    return graph, robin


def _spectrum(graph, robin, config: RunConfig):
    return compute_spectrum(
        graph,
        robin,
        n_max=config.n_max,
        k_max=config.k_max,
        step_scale=config.step_scale,
        tol=config.tol,
    )


def _require_coupling(robin: RobinSpec) -> None:
    if not robin.vertices or robin.sigma <= 0.0:
        raise GraphSpectraError(
            "this command needs coupled vertices and a positive sigma"
        )


def _require_index_target(config: RunConfig) -> None:
    if config.k_max is not None:
        raise GraphSpectraError("statistics pair spectra by index; use --nmax")


def cmd_spectrum(config: RunConfig) -> Table:
    graph, robin = _load(config)
    spectrum = _spectrum(graph, robin, config)
    # n_max scans certify a margin beyond the request; clip the table
    limit = None if config.k_max is not None else config.target_n
    rows = []
    for rec in spectrum.records:
        for i in range(rec.multiplicity):
            n = rec.index + i
            if limit is None or n <= limit:
                rows.append((n, rec.k, rec.k**2, rec.multiplicity))
    return Table(["n", "k_n", "lambda_n", "multiplicity"], rows, {})


def cmd_rng(config: RunConfig) -> Table:
    graph, robin = _load(config)
    _require_coupling(robin)
    _require_index_target(config)
    n = config.target_n
    neumann = compute_spectrum(
        graph, RobinSpec.neumann(), n_max=n,
        step_scale=config.step_scale, tol=config.tol,
    )
    robin_spectrum = compute_spectrum(
        graph, robin, n_max=n, step_scale=config.step_scale, tol=config.tol
    )
    series = rng_sequence(
        graph, robin.vertices, robin.sigma, n,
        neumann=neumann, robin_spectrum=robin_spectrum,
    )
    mean = theoretical_mean(graph, robin.vertices, robin.sigma)
    averaged = running_average(series.gaps, config.window)
    predicted = arctan_prediction(graph, robin.vertices, robin.sigma, series.k_neumann)
    decomp = boundary_star_decomposition(graph, robin)
    reports = check_all(series, decomp)
    flat_value = reports[0].bound[0]
    refined_bound = reports[2].bound
    violations = sum(len(r.violations) for r in reports)

    rows = [
        (
            i + 1,
            series.gaps[i],
            series.gaps[i] / mean,
            averaged[i],
            predicted[i],
            flat_value,
            refined_bound[i] if not np.isnan(refined_bound[i]) else None,
        )
        for i in range(n)
    ]
    clusters = accumulation_clusters(series)
    companions = {
        "clusters": (
            ["value", "count"],
            [(value, count) for value, count in clusters],
        )
    }
    return Table(
        ["n", "d_n", "d_n_normalized", "running_avg", "arctan_pred",
         "gap_bound", "improved_bound"],
        rows,
        companions,
        violations=violations,
    )


def cmd_weyl(config: RunConfig) -> Table:
    graph, robin = _load(config)
    _require_index_target(config)
    n = config.target_n
    spectrum = _spectrum(graph, robin, config)
    report = weyl_moments(graph, robin, n, spectrum=spectrum)
    total = graph.total_length
    slot_scale = 1.0 / (2.0 * total)

    rows = [
        ("n_used", float(report.n_used), None, None),
        ("skipped", float(report.skipped), None, None),
    ]
    for v in range(graph.num_vertices):
        predicted = 2.0 / (graph.degree(v) * total)
        measured = report.vertex_means[v]
        rows.append(
            (f"vertex_sq_{v}", measured, predicted,
             abs(measured - predicted) / predicted)
        )
    for j in range(graph.num_slots):
        measured = report.slot_means[j]
        rows.append(
            (f"slot_sq_{j}", measured, slot_scale,
             abs(measured - slot_scale) / slot_scale)
        )
    for i in range(graph.num_slots):
        for j in range(i + 1, graph.num_slots):
            measured = abs(report.cross_matrix[i, j])
            # relative to the diagonal scale; the prediction itself is 0
            rows.append((f"cross_{i}_{j}", measured, 0.0, measured / slot_scale))
    return Table(["quantity", "measured", "predicted", "rel_error"], rows, {})


def cmd_cdf(config: RunConfig) -> Table:
    graph, robin = _load(config)
    _require_coupling(robin)
    _require_index_target(config)
    n = config.target_n
    series = rng_sequence(graph, robin.vertices, robin.sigma, n)
    cdf = empirical_cdf(series)
    xs = np.unique(cdf.values)
    rows = [("cdf", float(x), float(x), float(cdf(x))) for x in xs]
    density, edges = np.histogram(series.gaps, bins=HISTOGRAM_BINS, density=True)
    rows.extend(
        ("hist", float(edges[i]), float(edges[i + 1]), float(density[i]))
        for i in range(density.size)
    )
    ceiling = shortest_edge_bound(graph, robin.sigma)
    top = float(np.max(series.gaps))
    rows.append(("support", top, ceiling, top / ceiling))
    violations = int(top >= ceiling)
    return Table(["kind", "x_lo", "x_hi", "value"], rows, {}, violations=violations)


def cmd_sensitivity(config: RunConfig) -> Table:
    graph, robin = _load(config)
    if not robin.vertices:
        raise GraphSpectraError("this command needs coupled vertices")
    _require_index_target(config)
    n = config.target_n
    spectrum = _spectrum(graph, robin, config)
    decomp = boundary_star_decomposition(graph, robin)
    lams = spectrum.eigenvalues(n)
    predictions = sensitivity_prediction(graph, robin.vertices, robin.sigma, lams)
    rows = []
    violations = 0
    for i in range(n):
        value = sensitivity(graph, robin, i + 1, spectrum=spectrum)
        lam = float(lams[i])
        if lam > 0.0:
            bound = float(sensitivity_bound(decomp, robin, lam))
            prediction = float(predictions[i])
        else:
            bound = None
            prediction = None
        if (
            bound is not None
            and not value.degenerate
            and value.value >= bound + 1e-10 * (1.0 + bound)
        ):
            violations += 1
        rows.append(
            (i + 1, lam, value.value, prediction, bound, int(value.degenerate))
        )
    return Table(
        ["n", "lambda_n", "sensitivity", "prediction", "bound", "degenerate"],
        rows,
        {},
        violations=violations,
    )


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "rng": cmd_rng,
    "weyl": cmd_weyl,
    "cdf": cmd_cdf,
    "sensitivity": cmd_sensitivity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphspectra",
        description="Spectra and coupling-gap statistics of metric graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("spectrum", "eigenvalue table for one coupling value"),
        ("rng", "index-paired gap sequence with bounds and predictions"),
        ("weyl", "eigenfunction moment averages against their limits"),
        ("cdf", "empirical gap distribution and histogram"),
        ("sensitivity", "coupling derivatives against prediction and bound"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--graph", required=True, help="graph JSON file")
        p.add_argument("--sigma", type=float, default=None,
                       help="override the file's coupling strength")
        target = p.add_mutually_exclusive_group()
        target.add_argument("--nmax", type=int, default=None,
                            help="number of eigenvalues (default 2500)")
        target.add_argument("--kmax", type=float, default=None,
                            help="wave-number ceiling instead of a count")
        p.add_argument("--window", type=int, default=21,
                       help="odd running-average window (default 21)")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--step-scale", type=float, default=1.0,
                       help="scan resolution multiplier")
        p.add_argument("--tol", type=float, default=None,
                       help="root refinement tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = RunConfig(
        command=args.command,
        graph_path=args.graph,
        sigma=args.sigma,
        n_max=args.nmax,
        k_max=args.kmax,
        window=args.window,
        out=args.out,
        format=args.format,
        step_scale=args.step_scale,
        tol=args.tol,
    )
    try:
        table = _COMMANDS[config.command](config)
    except (GraphSpectraError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(table, config)
    if table.violations:
        print(f"error: {table.violations} bound violation(s)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

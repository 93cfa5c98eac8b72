"""Command-line interface: deterministic CSV/JSON/SVG outputs plus a run
manifest with sha256 checksums.

Output formats are frozen in docs/output-schema.md.  Floats in CSV/JSON use
shortest round-trip decimals (repr); SVG coordinates use fixed 9 decimal
places.  The data stream goes to --out (or stdout); the manifest goes to
stdout when --out is set, stderr otherwise, so piped data stays clean.

Exit codes: 0 success, 2 usage/validation, 3 resource guard, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys

import numpy as np

from . import __version__, derham, energy, errors, geodesic, geometry, heat, kusuoka


# ---------------------------------------------------------------------------
# serialization helpers

def _csv(rows, header: str) -> str:
    out = io.StringIO()
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(repr(float(x)) if isinstance(x, float) else str(x)
                           for x in row))
        out.write("\n")
    return out.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def export_svg(points: np.ndarray, width: int = 640) -> str:
    """Single-path SVG of a 2D polyline; coordinates fixed to 9 decimals,
    y flipped so larger ordinates render upward."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("empty geometry cannot be exported")
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    pad = 0.05 * float(span.max())
    x0, y0 = lo - pad
    w, h = (hi - lo) + 2 * pad
    cmds = []
    for i, (x, y) in enumerate(points):
        cmds.append(f"{'M' if i == 0 else 'L'} {x:.9f} {-y:.9f}")
    stroke = 0.004 * max(w, h)
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" viewBox="{x0:.9f} {-(y0 + h):.9f} {w:.9f} {h:.9f}">\n'
        '<g fill="none" stroke="black" '
        f'stroke-width="{stroke:.9f}">\n'
        f'<path d="{" ".join(cmds)}"/>\n'
        "</g>\n</svg>\n"
    )


def _plane_coords(n: int, points: np.ndarray) -> np.ndarray:
    """(t, s) coordinates of ambient actual points in the plane P; the
    second coordinate is 0 when N = 2 (the plane degenerates to a line)."""
    return derham.to_chart(n, np.asarray(points, dtype=float))


def _parse_address(n: int, text: str) -> tuple[tuple[int, ...], int]:
    """Vertex address 'j' (boundary vertex) or 'w:j' (S_w(p_j)), letters as
    digits."""
    word_part, _, j_part = text.rpartition(":")
    try:
        j = int(j_part)
        word = tuple(int(c) for c in word_part)
    except ValueError:
        raise ValueError(f"bad vertex address {text!r}") from None
    geometry.check_word(n, word)
    geometry.check_letter(n, j)
    return word, j


# ---------------------------------------------------------------------------
# subcommands; each returns (payload_text, manifest_extras)

def _cmd_vertices(args) -> tuple[str, dict]:
    graph = energy.vertices_at_level(args.n, args.level, coords=args.coords)
    pts = graph.float_points()
    if args.format == "csv":
        header = "index," + ",".join(f"c{i}" for i in range(1, args.n + 1))
        rows = [(i, *map(float, p)) for i, p in enumerate(pts)]
        return _csv(rows, header), {"count": len(pts)}
    if args.format == "json":
        return _json({"n": args.n, "level": args.level, "coords": args.coords,
                      "vertices": pts.tolist()}), {"count": len(pts)}
    raise ValueError("vertices supports csv or json only")


def _cmd_curve(args) -> tuple[str, dict]:
    pts = derham.gamma_polyline(args.n, args.depth)
    plane = _plane_coords(args.n, pts)
    count = len(pts)
    if args.format == "csv":
        params = np.arange(count) / (count - 1)
        rows = [(float(u), float(x1), float(x2))
                for u, (x1, x2) in zip(params, plane)]
        return _csv(rows, "t,x1,x2"), {"points": count}
    if args.format == "json":
        return _json({"n": args.n, "depth": args.depth,
                      "points": plane.tolist()}), {"points": count}
    return export_svg(plane), {"points": count}


def _cmd_measure(args) -> tuple[str, dict]:
    word = tuple(int(c) for c in args.word)
    mass = kusuoka.nu_mass(args.n, word)
    return _json({"n": args.n, "word": args.word, "mass": mass}), {}


def _cmd_metric(args) -> tuple[str, dict]:
    word = tuple(int(c) for c in args.word)
    z = kusuoka.z_approx(args.n, word)
    return _json({
        "n": args.n,
        "word": args.word,
        "matrix": z.matrix.tolist(),
        "trace": z.trace,
        "eigenvalues": z.eigenvalues.tolist(),
        "idempotency_residual": z.idempotency_residual,
    }), {}


def _cmd_geodesic(args) -> tuple[str, dict]:
    graph = geodesic.build_geodesic_graph(args.n, args.level, args.depth)
    src = graph.vertex_of(*_parse_address(args.n, args.src))
    dst = graph.vertex_of(*_parse_address(args.n, args.dst))
    path = geodesic.shortest_path(graph, src, dst)
    extras = {"length": path.length, "arc_count": len(path.arcs)}
    if args.format == "json":
        return _json({
            "n": args.n, "level": args.level, "depth": args.depth,
            "src": args.src, "dst": args.dst,
            "length": path.length,
            "arcs": [{"word": "".join(map(str, w)), "pair": list(p),
                      "reversed": r} for w, p, r in path.arcs],
        }), extras
    pts = (graph.coords[[src]] if not path.arcs
           else geodesic.path_polyline(args.n, path, args.depth))
    plane = _plane_coords(args.n, pts)
    if args.format == "csv":
        rows = [(float(x1), float(x2)) for x1, x2 in plane]
        return _csv(rows, "x1,x2"), extras
    return export_svg(plane), extras


def _cmd_holder(args) -> tuple[str, dict]:
    slope, r2 = derham.holder_estimate(args.n, depth=args.depth)
    return _json({
        "n": args.n,
        "closed_form": derham.closed_form_holder(args.n),
        "protasov": derham.protasov_holder(1.0 / (args.n + 2)),
        "estimate": slope,
        "r_squared": r2,
    }), {}


def _cmd_upsilon_check(args) -> tuple[str, dict]:
    pts = derham.sample_attractor_points(args.n, args.depth, args.count,
                                         seed=args.seed)
    chart = derham.project_to_chart(args.n, pts)
    inside = int(np.sum(derham.upsilon_contains(args.n, chart)))
    return _json({"n": args.n, "count": args.count, "depth": args.depth,
                  "seed": args.seed, "inside": inside,
                  "all_inside": inside == args.count}), {}


def _cmd_energy_check(args) -> tuple[str, dict]:
    n, m = args.n, args.level
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        boundary = rng.standard_normal(n)
        vals = energy.harmonic_cell_values(n, boundary, m)
        e_m = float(energy.cell_energy(n, m, vals))
        e_0 = float(energy.cell_energy(n, 0, boundary[None]))
        worst = max(worst, abs(e_m - e_0) / abs(e_0))
    a = rng.standard_normal(n - 1)
    kappa = kusuoka.harmonic_energy_ratio(n, a, min(m, 6))
    return _json({
        "n": n, "level": m, "seed": args.seed, "trials": args.trials,
        "max_invariance_residual": worst,
        "kappa": kappa,
        "kappa_expected": n * (n - 1) / 2,
    }), {}


def _cmd_heat(args) -> tuple[str, dict]:
    dec = heat.spectral_decomposition(heat.build_laplacian(args.n, args.level))
    t = args.time
    kern = heat.heat_kernel_matrix(dec, t)
    kern2 = heat.heat_kernel_matrix(dec, t / 2)
    mass = np.diag(dec.masses)
    return _json({
        "n": args.n, "level": args.level, "time": t,
        "lambda0": float(dec.eigenvalues[0]),
        "spectral_gap": float(dec.eigenvalues[1]),
        "symmetry_residual": float(np.max(np.abs(kern - kern.T))),
        "semigroup_residual": float(np.max(np.abs(kern2 @ mass @ kern2 - kern))),
        "conservation_residual": float(np.max(np.abs(kern @ dec.masses - 1.0))),
        "longtime_residual": float(
            np.max(np.abs(heat.heat_kernel_matrix(dec, 50.0) - 1.0))),
    }), {}


def _cmd_gaussian_report(args) -> tuple[str, dict]:
    t_grid = [0.02, 0.05, 0.1]
    rep = heat.gaussian_fit(args.n, args.level, t_grid, seed=args.seed,
                            geodesic_depth=args.depth)
    summary = {
        "n": rep.n, "level": rep.m, "seed": args.seed,
        "window": list(rep.window), "n_window": rep.n_window,
        "slope": rep.slope, "intercept": rep.intercept,
        "r_squared": rep.r_squared, "empty_fit": rep.empty_fit,
    }
    if args.format == "json":
        return _json(summary), {"r_squared": rep.r_squared}
    if args.format == "csv":
        rows = [(s["t"], s["x"], s["y"], s["kernel"], s["distance"])
                for s in rep.samples]
        return _csv(rows, "t,x,y,kernel,distance"), {"r_squared": rep.r_squared}
    raise ValueError("gaussian-report supports csv or json only")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgasket")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *, word=False, src_dst=False, coords=False,
            time_flag=False, count=False, trials=False,
            depth_default=None, level_default=None, fmt_default="json"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--format", choices=["csv", "json", "svg"],
                       default=fmt_default)
        p.add_argument("--out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--depth", type=int, default=depth_default)
        p.add_argument("--level", type=int, default=level_default)
        if word:
            p.add_argument("--word", required=True)
        if src_dst:
            p.add_argument("--src", required=True)
            p.add_argument("--dst", required=True)
        if coords:
            p.add_argument("--coords", choices=["euclidean", "harmonic"],
                           default="euclidean")
        if time_flag:
            p.add_argument("--time", type=float, default=0.1)
        if count:
            p.add_argument("--count", type=int, default=1000)
        if trials:
            p.add_argument("--trials", type=int, default=20)
        p.set_defaults(func=func)
        return p

    add("vertices", _cmd_vertices, coords=True, level_default=0,
        fmt_default="csv")
    add("curve", _cmd_curve, depth_default=10, fmt_default="csv")
    add("measure", _cmd_measure, word=True)
    add("metric", _cmd_metric, word=True)
    add("geodesic", _cmd_geodesic, src_dst=True, depth_default=10,
        level_default=1)
    add("holder", _cmd_holder, depth_default=20)
    add("upsilon-check", _cmd_upsilon_check, count=True, depth_default=10)
    add("energy-check", _cmd_energy_check, trials=True, level_default=6)
    add("heat", _cmd_heat, time_flag=True, level_default=3)
    add("gaussian-report", _cmd_gaussian_report, level_default=5,
        depth_default=8)
    return parser


def parse_and_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.n < 2:
        print("N must be >= 2", file=sys.stderr)
        return 2
    try:
        payload, extras = args.func(args)
    except (errors.ResourceGuardError, errors.DepthLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, np.linalg.LinAlgError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    manifest = {
        "command": args.command,
        "parameters": {
            k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "command", "out") and v is not None
        },
        "version": __version__,
        "checksums": {
            "output": hashlib.sha256(payload.encode("utf-8")).hexdigest(),
        },
        "extras": extras,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        sys.stdout.write(_json(manifest))
    else:
        sys.stdout.write(payload)
        sys.stderr.write(_json(manifest))
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()

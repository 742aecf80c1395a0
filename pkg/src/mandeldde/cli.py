"""Command line: ``mandeldde <subcommand> ...``.

Exit status 0 on success, 2 on usage errors, 1 on runtime failures.
Every artifact is accompanied by ``<stem>.manifest.json``.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .cycles import trace_multiplier_boundary
from .dynamics import DdeConfig, DiscreteParams
from .errors import MandelDdeError
from .io import (Table, build_manifest, manifest_path, write_csv, write_manifest,
                 write_ppm)
from .render import (BULB_WINDOW, DEFAULT_FRAME, GridSpec, PaletteSpec, colorize,
                     count_classes, overlay_curves, render_grid, resolve_workers)
from .stability import hopf_boundary_curve, is_stable, stationary_points

CLASS_NAMES = ("escaped", "converged", "oscillating", "undecided")


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text}") from exc


def _add_grid(p, frame, size):
    p.add_argument("--re-min", type=float, default=frame[0])
    p.add_argument("--re-max", type=float, default=frame[1])
    p.add_argument("--im-min", type=float, default=frame[2])
    p.add_argument("--im-max", type=float, default=frame[3])
    p.add_argument("--width", type=int, default=size)
    p.add_argument("--height", type=int, default=size)


def _add_dde(p, tau_end):
    p.add_argument("--tau0", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=None, help="default tau0/200")
    p.add_argument("--tau-end", type=float, default=tau_end)
    p.add_argument("--escape-radius", type=float, default=None,
                   help="default 10 (dde) or 2 (discrete)")
    p.add_argument("--conv-tol", type=float, default=1e-6)
    p.add_argument("--window", type=float, default=None, help="default 10*tau0")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mandeldde",
        description="Mandelbrot map and its delayed relaxation extension.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("render", help="classify a parameter grid and write PPM + CSV")
    r.add_argument("--mode", choices=["discrete", "dde"], default="dde")
    _add_grid(r, DEFAULT_FRAME, 600)
    _add_dde(r, 200.0)
    r.add_argument("--max-iter", type=int, default=1000)
    r.add_argument("--overlay", action="store_true",
                   help="draw the cardioid (discrete) or stationary-stability edge (dde)")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--out", required=True, metavar="PREFIX")

    b = sub.add_parser("boundary", help="export an analytic boundary curve as CSV")
    b.add_argument("--curve", choices=["cardioid", "period2", "period3", "hopf"], required=True)
    b.add_argument("--tau0", type=float, default=10.0)
    b.add_argument("--samples", type=int, default=256)
    b.add_argument("--out", required=True)

    s = sub.add_parser("stability", help="stability verdicts of stationary states")
    s.add_argument("--zr", type=float)
    s.add_argument("--zi", type=float)
    s.add_argument("--cr", type=float)
    s.add_argument("--ci", type=float)
    s.add_argument("--tau0", type=float, required=True)

    f = sub.add_parser("feigenbaum", help="post-transient |z| along a parameter line")
    f.add_argument("--c0", type=_complex, default=0j)
    f.add_argument("--dir", type=_complex, default=1 + 0j)
    f.add_argument("--s-min", type=float, required=True)
    f.add_argument("--s-max", type=float, required=True)
    f.add_argument("--n", type=int, default=200)
    f.add_argument("--mode", choices=["discrete", "dde"], default="dde")
    _add_dde(f, 2000.0)
    f.add_argument("--max-iter", type=int, default=20000)
    f.add_argument("--out", required=True)

    t = sub.add_parser("timeseries", help="write z(tau) of one parameter")
    t.add_argument("--cr", type=float, required=True)
    t.add_argument("--ci", type=float, required=True)
    _add_dde(t, 600.0)
    t.add_argument("--stride", type=int, default=1)
    t.add_argument("--out", required=True)

    d = sub.add_parser("decay", help="non-escaped pixel counts versus horizon")
    d.add_argument("--tau-ends", type=_float_list, default=[200.0, 1000.0, 4000.0])
    _add_grid(d, BULB_WINDOW, 120)
    d.add_argument("--tau0", type=float, default=10.0)
    d.add_argument("--dt", type=float, default=0.05)
    d.add_argument("--escape-radius", type=float, default=10.0)
    d.add_argument("--conv-tol", type=float, default=1e-6)
    d.add_argument("--window", type=float, default=None)
    d.add_argument("--workers", type=int, default=None)
    d.add_argument("--out", default=None, help="optional CSV of the counts")
    return parser


def _dde_config(args, tau_end=None) -> DdeConfig:
    return DdeConfig(tau0=args.tau0, dt=args.dt,
                     tau_end=args.tau_end if tau_end is None else tau_end,
                     escape_radius=10.0 if args.escape_radius is None else args.escape_radius,
                     conv_tol=args.conv_tol, window=args.window)


def _grid(args) -> GridSpec:
    return GridSpec(args.re_min, args.re_max, args.im_min, args.im_max,
                    args.width, args.height)


def _check_parent(path) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {parent}")


def _finish(args, argv, artifact, config, started, **extra) -> None:
    artifacts = artifact if isinstance(artifact, list) else [artifact]
    manifest = build_manifest(args.command, argv, config, artifacts,
                              time.perf_counter() - started, **extra)
    write_manifest(manifest, manifest_path(artifacts[0]))


def cmd_render(args, argv) -> int:
    prefix = Path(args.out)
    _check_parent(prefix.with_suffix(".ppm"))
    started = time.perf_counter()
    grid = _grid(args)
    if args.mode == "dde":
        cfg = _dde_config(args)
        curves = [[s.c_H for s in hopf_boundary_curve(cfg.tau0, 720)]]
    else:
        cfg = DiscreteParams(args.max_iter,
                             2.0 if args.escape_radius is None else args.escape_radius,
                             args.conv_tol)
        curves = [trace_multiplier_boundary(1, 720)]
    curves = [c + c[:1] for c in curves]
    workers = resolve_workers(args.workers)
    raster = render_grid(grid, args.mode, cfg, workers)
    image = colorize(raster)
    if args.overlay:
        image = overlay_curves(image, curves, grid, (255, 0, 0))

    ppm = prefix.parent / (prefix.name + ".ppm")
    csv = prefix.parent / (prefix.name + ".csv")
    write_ppm(image, ppm)
    re_vals, im_vals = grid.re_values(), grid.im_values()
    rows = [(i, j, re_vals[i], im_vals[j], int(raster.classes[j, i]), raster.scalars[j, i])
            for j in range(grid.height) for i in range(grid.width)]
    write_csv(Table(["i", "j", "c_re", "c_im", "class", "scalar"], rows), csv)

    tallies = dict(zip(CLASS_NAMES, count_classes(raster)))
    config = {"mode": args.mode, "grid": grid.to_dict(), "params": cfg.to_dict(),
              "overlay": args.overlay, "palette": asdict(PaletteSpec())}
    _finish(args, argv, [ppm, csv], config, started, tallies=tallies, workers=workers)
    print(" ".join(f"{k}={v}" for k, v in tallies.items()))
    return 0


def cmd_boundary(args, argv) -> int:
    _check_parent(args.out)
    started = time.perf_counter()
    n = args.samples
    if args.curve == "hopf":
        samples = hopf_boundary_curve(args.tau0, n)
        table = Table(["phi", "omega", "c_re", "c_im", "marginal_modulus"],
                      [(s.phi, s.omega, s.c_H.real, s.c_H.imag, s.marginal_modulus)
                       for s in samples])
    elif args.curve == "period3":
        pts = trace_multiplier_boundary(3, n)
        table = Table(["theta", "c_re", "c_im"],
                      [(2 * math.pi * (k + 0.5) / n, c.real, c.imag) for k, c in enumerate(pts)])
    else:
        pts = trace_multiplier_boundary(1 if args.curve == "cardioid" else 2, n)
        table = Table(["phi", "c_re", "c_im"],
                      [(2 * math.pi * k / n, c.real, c.imag) for k, c in enumerate(pts)])
    write_csv(table, args.out)
    config = {"curve": args.curve, "samples": n, "tau0": args.tau0}
    _finish(args, argv, Path(args.out), config, started)
    return 0


def _verdict_line(label: str, z_s: complex, tau0: float) -> str:
    v = is_stable(z_s, tau0)
    word = "stable" if v.stable else "unstable"
    return (f"{label} z_s={z_s.real:.17g}{z_s.imag:+.17g}j |z_s|={abs(z_s):.17g} "
            f"threshold={v.binding_threshold:.17g} omega={v.omega_used:.17g} {word}")


def cmd_stability(args, argv) -> int:
    has_z = args.zr is not None or args.zi is not None
    has_c = args.cr is not None or args.ci is not None
    if has_z == has_c:
        raise UsageError("give either --zr/--zi or --cr/--ci")
    if has_z:
        z = complex(args.zr or 0.0, args.zi or 0.0)
        print(_verdict_line("z_s", z, args.tau0))
    else:
        c = complex(args.cr or 0.0, args.ci or 0.0)
        for label, z in zip(("minus", "plus"), stationary_points(c)):
            print(_verdict_line(label, z, args.tau0))
    return 0


def cmd_feigenbaum(args, argv) -> int:
    from .bifurcation import feigenbaum_scan

    _check_parent(args.out)
    started = time.perf_counter()
    if args.mode == "dde":
        cfg = _dde_config(args)
    else:
        cfg = DiscreteParams(args.max_iter,
                             2.0 if args.escape_radius is None else args.escape_radius,
                             args.conv_tol)
    scan = feigenbaum_scan(args.c0, args.dir, (args.s_min, args.s_max), args.n, args.mode, cfg)
    write_csv(scan.table(), args.out)
    config = {"mode": args.mode, "c0": args.c0, "dir": args.dir,
              "s_min": args.s_min, "s_max": args.s_max, "n": args.n, "params": cfg.to_dict()}
    diagnostics = {f"{s:.17g}": d for s, d in zip(scan.s, scan.diagnostics) if d}
    _finish(args, argv, Path(args.out), config, started, diagnostics=diagnostics)
    return 0


def cmd_timeseries(args, argv) -> int:
    from .bifurcation import time_series

    _check_parent(args.out)
    started = time.perf_counter()
    cfg = _dde_config(args)
    c = complex(args.cr, args.ci)
    series = time_series(c, "dde", cfg, args.stride)
    rows = [(t, z.real, z.imag, abs(z)) for t, z in zip(series.tau, series.z)]
    write_csv(Table(["tau", "z_re", "z_im", "abs_z"], rows), args.out)
    out = series.outcome
    _finish(args, argv, Path(args.out), {"c": c, "params": cfg.to_dict(), "stride": args.stride},
            started, outcome={"kind": out.kind.name.lower(), "z_final": out.z_final,
                              "scalar": out.scalar})
    return 0


def cmd_decay(args, argv) -> int:
    if args.out:
        _check_parent(args.out)
    started = time.perf_counter()
    grid = _grid(args)
    workers = resolve_workers(args.workers)
    rows = []
    for tau_end in args.tau_ends:
        cfg = DdeConfig(tau0=args.tau0, dt=args.dt, tau_end=tau_end,
                        escape_radius=args.escape_radius, conv_tol=args.conv_tol,
                        window=args.window)
        counts = count_classes(render_grid(grid, "dde", cfg, workers))
        rows.append((tau_end, *counts, sum(counts[1:])))
        print(f"tau_end={tau_end:g} " + " ".join(f"{k}={v}" for k, v in zip(CLASS_NAMES, counts))
              + f" non_escaped={sum(counts[1:])}")
    if args.out:
        write_csv(Table(["tau_end", *CLASS_NAMES, "non_escaped"], rows), args.out)
        config = {"grid": grid.to_dict(), "tau0": args.tau0, "dt": args.dt,
                  "tau_ends": args.tau_ends, "escape_radius": args.escape_radius,
                  "conv_tol": args.conv_tol, "window": cfg.window, "n_delay": cfg.n_delay}
        _finish(args, argv, Path(args.out), config, started, workers=workers)
    return 0


COMMANDS = {
    "render": cmd_render,
    "boundary": cmd_boundary,
    "stability": cmd_stability,
    "feigenbaum": cmd_feigenbaum,
    "timeseries": cmd_timeseries,
    "decay": cmd_decay,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except (UsageError, ValueError) as exc:
        print(f"mandeldde {args.command}: {exc}", file=sys.stderr)
        return 2
    except (OSError, MandelDdeError) as exc:
        print(f"mandeldde {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

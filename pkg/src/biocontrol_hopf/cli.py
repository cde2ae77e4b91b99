"""Command-line front end.

Each subcommand prints a short text report on stdout. ``--csv PATH``
additionally writes the machine-readable table (``--csv -`` sends it to
stdout instead of the report). Floats in CSV use ``%.9e``.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
Failures print one line ``error: <category>: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .continuation import default_k1_grid, find_tangency, snap_to_sigma, trace_sigma
from .dynamics import find_periodic_orbit, integrate
from .exceptions import BifurcationError, ConfigError, InvalidInputError
from .hopf import lyapunov_l1
from .model import equilibria, k1_max, reproduction_numbers
from .stability import classify_all

FLOAT = "%.9e"

#: k1 values of the reference Σ table (c2 = 100), always sampled by `sigma`.
TABLE_K1 = (0.0004813, 0.0007954, 0.0011096, 0.0014238, 0.0017379, 0.0020521,
            0.0023663, 0.0026804, 0.0029946, 0.0033088, 0.0036230)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    return FLOAT % x


def csv_text(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return out.getvalue()


def read_q_file(path) -> np.ndarray:
    """Four complex numbers, one per line: ``a+bj``, ``a + b i`` or ``a b``."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                if len(parts) == 2 and not any(c in line for c in "ij"):
                    values.append(complex(float(parts[0]), float(parts[1])))
                else:
                    values.append(complex("".join(parts).replace("i", "j")))
            except ValueError:
                raise ConfigError(f"cannot read a complex number from {line!r}", number) from None
    if len(values) != 4:
        raise ConfigError(f"expected 4 components in {path}, found {len(values)}")
    return np.array(values)


# ---------------------------------------------------------------------------
# subcommands; each returns (text report, csv text)


def cmd_equilibria(cfg: RunConfig, args):
    p = cfg.params()
    R1, R2 = reproduction_numbers(p)
    eq = equilibria(p)
    rows = [(name, *x) for name, x in eq.items()]
    lines = [f"R1 = {R1:.9g}", f"R2 = {R2:.9g}", f"k1_max = {k1_max(p):.9g}"]
    lines += [f"{name}: " + ", ".join(f"{v:.10g}" for v in x) for name, x in eq.items()]
    return "\n".join(lines) + "\n", csv_text(("name", "P", "M", "L", "G"), rows)


def cmd_classify(cfg: RunConfig, args):
    p = cfg.params()
    results = classify_all(p, cfg.tolerances)
    header = ["name", "kind"] + [f"{part}{i}" for i in range(1, 5) for part in ("re", "im")]
    rows, lines = [], []
    for c in results:
        vals = []
        for v in c.spectrum.values:
            vals += [v.real, v.imag]
        rows.append((c.which, c.label, *vals))
        eig = ", ".join(f"{v.real:.6g}{v.imag:+.6g}i" for v in c.spectrum.values)
        extra = f"  Δ = {c.delta:.6g}" if c.delta is not None else ""
        lines.append(f"{c.which}: {c.label}{extra}\n    eigenvalues: {eig}")
    return "\n".join(lines) + "\n", csv_text(header, rows)


def cmd_hopf(cfg: RunConfig, args):
    k1, k2 = cfg.k1, cfg.k2
    if k1 is None or k2 is None:
        raise InvalidInputError("hopf needs --k1 and --k2")
    notes = []
    if args.snap != "none":
        k1s, k2s = snap_to_sigma(k1, k2, cfg.values["c2"], vary=args.snap)
        if (k1s, k2s) != (k1, k2):
            notes.append(f"snapped ({k1:.9g}, {k2:.9g}) onto the Hopf curve: ({k1s:.12g}, {k2s:.12g})")
        cfg = cfg.with_overrides(k1=k1s, k2=k2s)
    q = read_q_file(args.q_from_file) if args.q_from_file else None
    report = lyapunov_l1(cfg.params(), q_override=q, sigma_band=args.sigma_tol, tol=cfg.tolerances)
    lines = notes + [
        f"k1 = {cfg.k1:.12g}, k2 = {cfg.k2:.12g}",
        f"omega0 = {report.omega0:.10g}",
        f"G21 = {report.G21.real:.10g} {report.G21.imag:+.10g}i",
        f"l1 = {report.l1:.10g} ({report.criticality}; normalization: {report.normalization})",
        f"transversality d Re λ/ds along grad Δ = {report.transversality:.6g}",
        "q = " + ", ".join(f"{v.real:.10g}{v.imag:+.10g}i" for v in report.q),
        "p = " + ", ".join(f"{v.real:.10g}{v.imag:+.10g}i" for v in report.p),
    ]
    row = (cfg.k1, cfg.k2, report.omega0, report.G21.real, report.G21.imag, report.l1,
           report.transversality)
    return "\n".join(lines) + "\n", csv_text(
        ("k1", "k2", "omega0", "re_g21", "im_g21", "l1", "transversality"), [row])


def sigma_svg(points, c2, bound, width=640, height=480, margin=60) -> str:
    """Minimal SVG 1.1 picture of S, Σ, the diagonal and k1 = k1_max."""
    k2_top = bound
    sx = lambda k: margin + (width - 2 * margin) * k / bound
    sy = lambda k: height - margin - (height - 2 * margin) * k / k2_top
    poly = lambda pts: " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        f'<title>Hopf curve for c2 = {c2:g}</title>',
        f'<polygon points="{poly([(0, 0), (bound, 0), (bound, bound)])}" fill="#eef4fb" stroke="none"/>',
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(bound):.2f}" y2="{sy(0):.2f}" stroke="black"/>',
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(0):.2f}" y2="{sy(k2_top):.2f}" stroke="black"/>',
        f'<polyline points="{poly([(0, 0), (bound, bound)])}" fill="none" stroke="gray" stroke-dasharray="4,3"/>',
        f'<line x1="{sx(bound):.2f}" y1="{sy(0):.2f}" x2="{sx(bound):.2f}" y2="{sy(bound):.2f}" stroke="gray"/>',
    ]
    if points:
        parts.append(f'<polyline points="{poly([(pt.k1, pt.k2) for pt in points])}" '
                     'fill="none" stroke="crimson" stroke-width="2"/>')
    parts += [
        f'<text x="{width / 2:.0f}" y="{height - 20}" text-anchor="middle">k1</text>',
        f'<text x="20" y="{height / 2:.0f}" text-anchor="middle">k2</text>',
        f'<text x="{sx(bound):.2f}" y="{height - margin + 16}" text-anchor="end">k1_max = {bound:.6g}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def cmd_sigma(cfg: RunConfig, args):
    c2 = cfg.values["c2"]
    n = args.n or cfg.grid.get("n_points", 200)
    lo, hi = cfg.grid.get("k1_lo"), cfg.grid.get("k1_hi")
    grid = None
    if lo is not None or hi is not None:
        grid = np.linspace(lo or 1e-7, hi or 0.999 * k1_max(cfg.with_overrides(k1=1e-6, k2=1e-6).params()), n)
    if args.table_points and c2 == 100.0:
        if grid is None:
            grid = default_k1_grid(c2, n)
        grid = np.union1d(grid, TABLE_K1)
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            points = trace_sigma(c2, n, k1_grid=grid, executor=pool)
    else:
        points = trace_sigma(c2, n, k1_grid=grid)
    bound = k1_max(cfg.with_overrides(k1=1e-6, k2=1e-6).params())
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(sigma_svg(points, c2, bound))
    rows = [(pt.k1, pt.k2, pt.omega0, pt.l1_sign, pt.delta_residual) for pt in points]
    text = f"c2 = {c2:g}, k1_max = {bound:.9g}: {len(points)} points on the Hopf curve\n"
    if points:
        signs = sorted({pt.l1_sign for pt in points})
        text += (f"k1 in [{points[0].k1:.6g}, {points[-1].k1:.6g}], "
                 f"omega0 in [{min(pt.omega0 for pt in points):.6g}, {max(pt.omega0 for pt in points):.6g}], "
                 f"sign(l1): {' '.join(signs)}\n")
    return text, csv_text(("k1", "k2", "omega0", "l1_sign", "delta_residual"), rows)


def cmd_tangency(cfg: RunConfig, args):
    t = find_tangency()
    d = t.diagnostics
    g = t.gradient
    cosine = float(g @ np.array([-1.0, 1.0]) / (np.sqrt(2) * np.linalg.norm(g)))
    text = (f"c2* = {t.c2_star:.10g}\nT = ({t.T[0]:.10g}, {t.T[1]:.10g})\n"
            f"grad Δ(T) = ({g[0]:.6g}, {g[1]:.6g}), cos angle to (-1, 1) = {cosine:.9f}\n"
            f"k1_max(c2*) = {d['k1_max']:.9g}\nd2c2/dk1^2 = {d['d2c2_dk1']:.6g}\n")
    row = (t.c2_star, t.T[0], t.T[1], g[0], g[1], d["k1_max"], d["d2c2_dk1"])
    return text, csv_text(("c2_star", "k1", "k2", "grad_k1", "grad_k2", "k1_max", "d2c2_dk1"), [row])


def _parse_state(text):
    try:
        x = [float(v) for v in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"--x0 must be four comma-separated numbers, got {text!r}") from None
    if len(x) != 4:
        raise InvalidInputError(f"--x0 needs 4 components, got {len(x)}")
    return np.array(x)


def cmd_simulate(cfg: RunConfig, args):
    p = cfg.params()
    x0 = equilibria(p).A4 if args.x0 is None else _parse_state(args.x0)
    t_end = args.t_end or cfg.grid.get("t_end", 100.0)
    tol = args.tol or cfg.grid.get("ode_tol", 1e-9)
    traj = integrate(p, x0, t_end, tol)
    rows = [(t, *x) for t, x in zip(traj.t, traj.x)]
    if args.every:
        ts = np.linspace(0.0, t_end, int(round(t_end / args.every)) + 1)
        rows = [(t, *traj.at(t)) for t in ts]
    s = traj.stats
    text = (f"integrated to t = {traj.t[-1]:.6g}: {s['steps']} steps, {s['rejected']} rejected\n"
            f"final state: " + ", ".join(f"{v:.10g}" for v in traj.final) + "\n")
    return text, csv_text(("t", "P", "M", "L", "G"), rows)


def cmd_orbit(cfg: RunConfig, args):
    p = cfg.params()
    orbit = find_periodic_orbit(p, hint_radius=args.hint_radius)
    traj = orbit.trajectory
    mults = ", ".join(f"{m.real:.8g}{m.imag:+.3g}i" for m in orbit.multipliers)
    lam = orbit.diagnostics["eigenvalue"]
    text = (f"critical eigenvalue: {lam.real:.6g} {lam.imag:+.8g}i\n"
            f"period = {orbit.period:.10g} (2π/ω = {2 * np.pi / lam.imag:.10g})\n"
            f"anchor = " + ", ".join(f"{v:.10g}" for v in orbit.anchor) + "\n"
            f"radius = {orbit.radius:.6g}, amplitude = {orbit.amplitude:.6g}\n"
            f"Floquet multipliers: {mults}\nverdict: {orbit.verdict}\n"
            f"Newton residuals: " + ", ".join(f"{r:.3g}" for r in orbit.residuals) + "\n")
    rows = [(t, *x) for t, x in zip(traj.t, traj.x)]
    return text, csv_text(("t", "P", "M", "L", "G"), rows)


COMMANDS = {
    "equilibria": cmd_equilibria, "classify": cmd_classify, "hopf": cmd_hopf,
    "sigma": cmd_sigma, "tangency": cmd_tangency, "simulate": cmd_simulate, "orbit": cmd_orbit,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value parameter file")
    common.add_argument("--k1", type=float)
    common.add_argument("--k2", type=float)
    common.add_argument("--c2", type=float)
    common.add_argument("--csv", help="write the CSV table here ('-' for stdout)")

    parser = _Parser(prog="biocontrol-hopf", description="Hopf analysis of the host-parasitoid model.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("equilibria", parents=[common], help="equilibria, R1, R2 and k1_max")
    sub.add_parser("classify", parents=[common], help="stability of A1..A4")
    h = sub.add_parser("hopf", parents=[common], help="first Lyapunov coefficient on the Hopf curve")
    h.add_argument("--q-from-file", help="eigenvector q to use, four complex numbers")
    h.add_argument("--sigma-tol", type=float, help="band |Δ|/(a1 a2 a3) accepted as on the curve")
    h.add_argument("--snap", choices=("k1", "k2", "none"), default="k1",
                   help="coordinate moved to put the point exactly on the curve (default k1)")
    s = sub.add_parser("sigma", parents=[common], help="trace the Hopf curve")
    s.add_argument("--n", type=int, help="number of grid points (default 200)")
    s.add_argument("--svg", help="write an SVG picture here")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--no-table-points", dest="table_points", action="store_false",
                   help="do not add the reference table k1 values to the grid (c2 = 100)")
    sub.add_parser("tangency", parents=[common], help="tangency of the curve with k1 = k2")
    m = sub.add_parser("simulate", parents=[common], help="integrate a trajectory")
    m.add_argument("--x0", help="initial state P,M,L,G (default A4)")
    m.add_argument("--t-end", type=float)
    m.add_argument("--tol", type=float)
    m.add_argument("--every", type=float, help="resample the output at this spacing")
    o = sub.add_parser("orbit", parents=[common], help="periodic orbit near the Hopf point")
    o.add_argument("--hint-radius", type=float)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = cfg.with_overrides(k1=args.k1, k2=args.k2, c2=args.c2)
        text, table = COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=stderr)
        return 1
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc.category}: {exc}", file=stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=stderr)
        return 1
    except BifurcationError as exc:
        print(f"error: {exc.category}: {exc}", file=stderr)
        return 2
    if args.csv == "-":
        stdout.write(table)
    else:
        stdout.write(text)
        if args.csv:
            with open(args.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(table)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

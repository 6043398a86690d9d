"""Command line interface: ``harmonic-newton <subcommand> ...``.

Exit status is 0 on success, 1 for usage errors and 2 for numerical
failures.  Commands that write files also write a JSON sidecar manifest
(``<output>.manifest.json``); ``replay MANIFEST`` reruns the recorded
command.
"""
import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certify import kantorovich, mysovskii_disk
from .errors import HarmonicNewtonError
from .harmonic_map import BUILTINS, function_spec_from_json
from .laurent import QuadratureConfig, default_radius, laurent_coefficients
from .newton import StoppingConfig, default_n_jobs, iterate, iterate_arrays
from .search import (
    GridSpec,
    find_zeros,
    label_basins,
    make_grid,
    zeros_to_csv,
    zeros_to_json,
)
from .seeding import (
    LaurentData,
    infinity_seeds,
    laurent_data,
    laurent_data_at_infinity,
    normal_form,
    pole_seeds,
    singular_seeds,
)
from .viz import overlay_dots, render_basins, render_phase, save_image

__all__ = ["run", "main", "build_parser", "default_grid"]

# options whose values may legitimately start with '-'
VALUE_OPTIONS = {
    "--window", "--shift", "--w", "--at", "--at-pole", "--singular", "--center",
    "--deltas", "--delta", "--r", "--eps", "--k",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# argument helpers


def parse_complex(text):
    """``"1+2j"``, ``"-0.5j"``, ``"3"`` or ``"re,im"``."""
    text = str(text).strip().replace(" ", "")
    try:
        if "," in text:
            re_, im_ = text.split(",")
            return complex(float(re_), float(im_))
        return complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_window(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be x_min,x_max,y_min,y_max; got {text!r}") from None
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise argparse.ArgumentTypeError(f"window must be x_min,x_max,y_min,y_max; got {text!r}")
    return vals


def parse_floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers; got {text!r}") from None


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _join_negative_values(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


# --------------------------------------------------------------------------
# parser


def _add_function_args(p):
    g = p.add_argument_group("function")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--builtin", choices=sorted(BUILTINS), help="catalog map")
    src.add_argument("--spec", metavar="FILE", help="JSON function spec")
    g.add_argument("--n", type=_positive_int, help="degree / number of masses")
    g.add_argument("--r", type=_positive_float, help="mass ring radius")
    g.add_argument("--eps", type=float, help="central mass (rhie)")
    g.add_argument("--k", type=float, help="isothermal k")
    g.add_argument("--w", type=parse_complex, help="isothermal w")
    g.add_argument("--n-poles", type=_positive_int, help="poles listed for tan_conj")
    g.add_argument("--shift", type=parse_complex, help="add a constant to f")


def _add_grid_args(p):
    g = p.add_argument_group("grid")
    g.add_argument("--window", type=parse_window, help="x_min,x_max,y_min,y_max")
    g.add_argument("--mesh", type=_positive_float)


def _add_stopping_args(p):
    g = p.add_argument_group("iteration")
    g.add_argument("--maxit", type=_positive_int, default=50)
    g.add_argument("--restol", type=_positive_float, default=1e-14)
    g.add_argument("--steptol", type=_positive_float, default=1e-14)
    g.add_argument("--linsys", choices=("never", "always", "auto"), default="never")
    g.add_argument("--threads", type=_positive_int,
                   help="worker threads (default: HN_THREADS or 1)")


def build_parser():
    parser = _Parser(prog="harmonic-newton",
                     description="Zeros of harmonic maps f = h + conj(g) by the harmonic Newton method.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="find zeros from a grid of initial points")
    _add_function_args(p)
    _add_grid_args(p)
    _add_stopping_args(p)
    p.add_argument("--dedup-tol", type=_positive_float, default=1e-6)
    p.add_argument("--out", help="zero list, .csv or .json")

    p = sub.add_parser("basins", help="render basins of attraction")
    _add_function_args(p)
    _add_grid_args(p)
    _add_stopping_args(p)
    p.add_argument("--palette-seed", type=int, default=0)
    p.add_argument("--max-shade", type=_positive_int, help="default: --maxit")
    p.add_argument("--mark-zeros", action="store_true")
    p.add_argument("--out", default="basins.ppm", help=".ppm or .png")

    p = sub.add_parser("phaseplot", help="render a phase plot")
    _add_function_args(p)
    p.add_argument("--window", type=parse_window)
    p.add_argument("--width", type=_positive_int, default=400)
    p.add_argument("--height", type=_positive_int)
    p.add_argument("--zero-threshold", type=float, default=0.0)
    p.add_argument("--mark-zeros", action="store_true", help="overlay zeros found on the default grid")
    p.add_argument("--mark-poles", action="store_true")
    p.add_argument("--out", default="phase.ppm", help=".ppm or .png")

    p = sub.add_parser("seeds", help="initial points near poles, infinity or singular zeros")
    _add_function_args(p)
    _add_stopping_args(p)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--at-pole", type=parse_complex, metavar="Z")
    where.add_argument("--at-infinity", action="store_true")
    where.add_argument("--singular", type=parse_complex, metavar="Z0")
    p.add_argument("--order", type=_positive_int, help="pole order / degree at infinity")
    p.add_argument("--delta", type=float, help="perturbation size for --singular")
    p.add_argument("--radius", type=_positive_float, help="quadrature radius")
    p.add_argument("--nodes", type=_positive_int, default=256)
    p.add_argument("--coeffs", metavar="FILE",
                   help='JSON {"a": {"k": [re, im]}, "b": {...}} instead of quadrature')
    p.add_argument("--iterate", action="store_true", help="run Newton from each seed")

    p = sub.add_parser("certify", help="Kantorovich certificate / Mysovskii disk")
    _add_function_args(p)
    _add_stopping_args(p)
    p.add_argument("--at", type=parse_complex, action="append", required=True, metavar="Z")
    p.add_argument("--radius", type=_positive_float, default=0.1, help="domain radius")
    p.add_argument("--sup-ddh", type=float)
    p.add_argument("--sup-ddg", type=float)
    p.add_argument("--grid-n", type=_positive_int, default=32)
    p.add_argument("--mysovskii", action="store_true",
                   help="also iterate to the zero and estimate its convergence disk")

    p = sub.add_parser("laurent", help="Laurent coefficients of h and g")
    _add_function_args(p)
    p.add_argument("--center", type=parse_complex, default=0j)
    p.add_argument("--radius", type=_positive_float)
    p.add_argument("--nodes", type=_positive_int, default=256)
    p.add_argument("--kmin", type=int, default=-8)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--out", help="CSV file")

    p = sub.add_parser("sweep", help="basins of f - delta*c near a singular zero")
    _add_function_args(p)
    _add_grid_args(p)
    _add_stopping_args(p)
    p.add_argument("--at", type=parse_complex, default=0j, metavar="Z0", help="singular zero")
    p.add_argument("--deltas", type=parse_floats, default=[0.0, 0.003])
    p.add_argument("--region", type=_positive_float, default=0.2,
                   help="count zeros within this distance of Z0")
    p.add_argument("--palette-seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("replay", help="rerun a command from its sidecar manifest")
    p.add_argument("manifest")
    return parser


# --------------------------------------------------------------------------
# shared setup

BUILTIN_PARAMS = {
    "mpw": ("n", "r"),
    "rhie": ("n", "r", "eps"),
    "wilmshurst": ("n",),
    "tan_conj": ("n_poles",),
    "einstein": (),
    "isothermal": ("k", "w"),
}


def function_spec(args):
    """JSON-style spec (what goes into the manifest) from the function flags."""
    if args.spec:
        spec = json.loads(Path(args.spec).read_text())
    else:
        name = args.builtin or "mpw"
        if name == "shifted":
            raise UsageError("'shifted' needs a --spec file; use --shift with another builtin")
        params = {}
        for key in ("n", "r", "eps", "k", "w", "n_poles"):
            value = getattr(args, key, None)
            if value is None:
                continue
            if key not in BUILTIN_PARAMS[name]:
                raise UsageError(f"--{key.replace('_', '-')} does not apply to {name}")
            params[key] = _jsonable(value)
        spec = {"builtin": name, "params": params}
    if args.shift is not None:
        spec = dict(spec, shift=_jsonable(args.shift))
    return spec


def default_grid(spec):
    """Window and mesh used when none are given."""
    name = spec.get("builtin")
    if name == "tan_conj":
        return (-8.0, 8.0, -2.0, 2.0), 0.2
    if name == "wilmshurst":
        return (-1.5, 2.5, -2.0, 2.0), 0.05
    return (-2.0, 2.0, -2.0, 2.0), 0.05


def grid_spec(args, spec):
    window, mesh = default_grid(spec)
    window = args.window or window
    mesh = args.mesh or mesh
    return GridSpec(*window, mesh=mesh)


def stopping(args):
    return StoppingConfig(args.maxit, args.restol, args.steptol, args.linsys)


def n_jobs(args):
    return args.threads or default_n_jobs()


def write_manifest(args, argv, spec, outputs, extra=None):
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "function": spec,
        "outputs": [str(o) for o in outputs],
        "version": __version__,
    }
    if hasattr(args, "maxit"):
        manifest["stopping"] = {"maxit": args.maxit, "restol": args.restol,
                                "steptol": args.steptol, "use_linsys": args.linsys}
    manifest.update(extra or {})
    path = Path(f"{outputs[0]}.manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _fmt(z):
    z = complex(z)
    return f"{z.real:.16g} {z.imag:+.16g}i"


# --------------------------------------------------------------------------
# subcommands


def cmd_solve(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    grid = grid_spec(args, spec)
    zeros = find_zeros(fmap, grid, stopping(args), dedup_tol=args.dedup_tol, n_jobs=n_jobs(args))
    worst = max((z.residual for z in zeros), default=float("nan"))
    print(f"{len(zeros)} zeros, max residual {worst:.4e}", file=out)
    for z in zeros:
        print(f"  {_fmt(z.location)}  residual {z.residual:.3e}  {z.orientation.name}", file=out)
    if args.out:
        if args.out.lower().endswith(".json"):
            zeros_to_json(zeros, args.out)
        else:
            zeros_to_csv(zeros, args.out)
        write_manifest(args, argv, spec, [args.out], {"window": grid.window, "mesh": grid.mesh})
    return 0


def cmd_basins(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    grid = grid_spec(args, spec)
    cfg = stopping(args)
    result = iterate_arrays(fmap, make_grid(grid), cfg, n_jobs(args))
    labeling = label_basins(fmap, grid, cfg, result=result)
    zeros = labeling.zeros
    img = render_basins(labeling, args.palette_seed, args.max_shade or cfg.maxit)
    if args.mark_zeros:
        img = overlay_dots(img, [z.location for z in zeros], (0, 0, 0))
    save_image(img, args.out)
    unlabeled = int(np.sum(labeling.labels < 0))
    print(f"{len(zeros)} zeros, {labeling.n_basins} basins, {unlabeled} unlabeled points, "
          f"mean iterations {labeling.iteration_counts.mean():.3f}", file=out)
    write_manifest(args, argv, spec, [args.out],
                   {"window": grid.window, "mesh": grid.mesh, "palette_seed": args.palette_seed})
    return 0


def cmd_phaseplot(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    window = args.window or default_grid(spec)[0]
    height = args.height or max(1, round(args.width * (window[3] - window[2]) / (window[1] - window[0])))
    img = render_phase(fmap, args.width, height, window, args.zero_threshold)
    if args.mark_poles:
        img = overlay_dots(img, [p for p, _ in fmap.poles], (255, 255, 255))
    if args.mark_zeros:
        zeros = find_zeros(fmap, GridSpec(*window, mesh=default_grid(spec)[1]))
        img = overlay_dots(img, [z.location for z in zeros], (0, 0, 0))
    save_image(img, args.out)
    print(f"wrote {args.out} ({img.width}x{img.height})", file=out)
    write_manifest(args, argv, spec, [args.out], {"window": window})
    return 0


def _load_coeffs(path):
    obj = json.loads(Path(path).read_text())

    def side(key):
        d = obj.get(key, {})
        return {int(k): complex(*v) if isinstance(v, list) else complex(v) for k, v in d.items()}

    return side("a"), side("b")


def cmd_seeds(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    target = fmap
    if args.at_pole is not None:
        if args.order is None:
            raise UsageError("seeds --at-pole requires --order (the pole order)")
        if args.coeffs:
            a, b = _load_coeffs(args.coeffs)
            data = LaurentData(args.at_pole, args.order, a, b)
        else:
            data = laurent_data(fmap, args.at_pole, args.order, args.radius, args.nodes)
        seeds = pole_seeds(data)
    elif args.at_infinity:
        if args.order is None:
            raise UsageError("seeds --at-infinity requires --order (the degree n)")
        a, b = (_load_coeffs(args.coeffs) if args.coeffs
                else laurent_data_at_infinity(fmap, args.radius, args.nodes))
        seeds = infinity_seeds(a, b, args.order)
    else:
        if args.delta is None:
            raise UsageError("seeds --singular requires --delta")
        a, b = (_load_coeffs(args.coeffs) if args.coeffs
                else _taylor(fmap, args.singular, args.radius, args.nodes))
        nf = normal_form(a, b, args.singular)
        seeds = singular_seeds(nf, args.delta)
        target = fmap.shifted(-nf.perturbation(args.delta))
        print(f"theta {nf.theta:.16g}  c_tilde {_fmt(nf.c_tilde)}  "
              f"target f - {_fmt(nf.perturbation(args.delta))}", file=out)
    cfg = stopping(args)
    for s in seeds:
        line = _fmt(s)
        if args.iterate:
            o = iterate(target, s, cfg)
            line += (f"  -> {_fmt(o.final)}  {o.status.name}  iterations {o.iterations}"
                     f"  residual {o.residual:.4e}")
        print(line, file=out)
    return 0


def _taylor(fmap, z0, radius, nodes):
    data = laurent_data(fmap, z0, 1, radius, nodes, k_range=(0, 8))
    return data.a, data.b


def cmd_certify(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    cfg = stopping(args)
    for z in args.at:
        cert = kantorovich(fmap, z, args.radius, args.sup_ddh, args.sup_ddg, args.grid_n)
        rho = "none" if cert.rho is None else f"{cert.rho:.6e}"
        print(f"z0 {_fmt(z)}  alpha {cert.alpha:.6e}  omega0 {cert.omega0:.6e}  h0 {cert.h0:.6e}  "
              f"rho {rho}  domain {cert.domain_radius:g}  certified {cert.certified}  "
              f"empirical {cert.empirical}", file=out)
        if args.mysovskii:
            o = iterate(fmap, z, cfg)
            if not o.converged:
                raise HarmonicNewtonError(f"iteration from {_fmt(z)} did not converge ({o.status.name})")
            disk = mysovskii_disk(fmap, o.final, args.radius)
            covered = abs(o.final - z) < disk.radius
            print(f"  zero {_fmt(o.final)}  disk radius {disk.radius:.6e}  omega {disk.omega:.6e}  "
                  f"seed covered {covered}", file=out)
    return 0


def cmd_laurent(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    if not fmap.has_parts:
        raise UsageError(f"{fmap.name} has no separate h and g evaluators")
    radius = args.radius or default_radius(fmap.poles, args.center)
    try:
        cfg = QuadratureConfig(args.center, radius, args.nodes, args.kmin, args.kmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    a = laurent_coefficients(fmap.h, cfg)
    b = laurent_coefficients(fmap.g, cfg)
    rows = [(k, a[k], b[k]) for k in range(args.kmin, args.kmax + 1)]
    lines = ["k,a_re,a_im,b_re,b_im"] + [
        f"{k},{ak.real!r},{ak.imag!r},{bk.real!r},{bk.imag!r}" for k, ak, bk in rows]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        write_manifest(args, argv, spec, [args.out], {"radius": radius})
    for k, ak, bk in rows:
        print(f"{k:4d}  a {_fmt(ak)}  b {_fmt(bk)}", file=out)
    return 0


def cmd_sweep(args, argv, out):
    spec = function_spec(args)
    fmap = function_spec_from_json(spec)
    cfg = stopping(args)
    z0 = args.at
    if args.window is None:
        args.window = (z0.real - 1, z0.real + 1, z0.imag - 1, z0.imag + 1)
    args.mesh = args.mesh or 0.01
    grid = GridSpec(*args.window, mesh=args.mesh)
    a, b = _taylor(fmap, z0, None, 256)
    nf = normal_form(a, b, z0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    summary = []
    for i, delta in enumerate(args.deltas):
        target = fmap.shifted(-nf.perturbation(delta)) if delta else fmap
        result = iterate_arrays(target, make_grid(grid), cfg, n_jobs(args))
        labeling = label_basins(target, grid, cfg, result=result)
        zeros = labeling.zeros
        near = [z for z in zeros if abs(z.location - z0) < args.region]
        path = out_dir / f"sweep_{i:02d}.ppm"
        save_image(render_basins(labeling, args.palette_seed, cfg.maxit), path)
        outputs.append(path)
        print(f"delta {delta:g}: {len(near)} zeros within {args.region:g} of {_fmt(z0)}, "
              f"{labeling.n_basins} basins -> {path}", file=out)
        entry = {"delta": delta, "near_zeros": [_jsonable(z.location) for z in near]}
        if delta:
            try:
                seeds = singular_seeds(nf, delta)
            except HarmonicNewtonError as exc:
                print(f"  no seeds: {exc}", file=out)
                seeds = []
            for s in seeds:
                o = iterate(target, s, cfg)
                print(f"  seed {_fmt(s)} -> {_fmt(o.final)}  {o.status.name}", file=out)
        summary.append(entry)
    write_manifest(args, argv, spec, outputs,
                   {"window": grid.window, "mesh": grid.mesh, "sweep": summary})
    return 0


def cmd_replay(args, argv, out):
    manifest = json.loads(Path(args.manifest).read_text())
    if manifest.get("command") == "replay" or "argv" not in manifest:
        raise UsageError(f"{args.manifest}: not a replayable manifest")
    return run(manifest["argv"], out)


COMMANDS = {
    "solve": cmd_solve,
    "basins": cmd_basins,
    "phaseplot": cmd_phaseplot,
    "seeds": cmd_seeds,
    "certify": cmd_certify,
    "laurent": cmd_laurent,
    "sweep": cmd_sweep,
    "replay": cmd_replay,
}


def run(argv=None, out=None):
    """Run the CLI and return the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        return COMMANDS[args.command](args, argv, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except HarmonicNewtonError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())

"""Command line front end.

Exit codes: 0 success, 1 validation or consistency failure, 2 uncertified
integrality, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fixtures as fx
from .census import census_all
from .complex import InvalidComplexError, link_sphere, validate
from .cusp import CuspExperiment, covering_relation_check, cusp_limit_experiment, delta_threshold
from .develop import nondegeneracy_check, perturb
from .io import (
    CENSUS_COLUMNS,
    census_rows,
    csv_text,
    fmt,
    gnuplot_script,
    load_complex,
    load_map,
    load_simplex,
    read_json,
    save_complex,
    save_map,
    save_simplex,
    write_json,
    write_text,
)
from .simplex import (
    DEFAULT_SAMPLES,
    MCConfig,
    UnsupportedError,
    face_lattice,
    generalized_angle_sum,
    interior_angle,
    random_simplex,
    sphere_volume,
    volume_hopf,
    volume_mc,
)
from .volume import (
    gauss_bonnet_check,
    integrality_report,
    rep_volume_simplices,
)

EXIT_OK, EXIT_INVALID, EXIT_UNCERTIFIED, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _emit(args, text: str, path=None):
    path = path or getattr(args, "out", None)
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _mc(args) -> MCConfig:
    return MCConfig(args.seed, args.samples)


def _load(args, complex_key="complex", map_key="map"):
    K = load_complex(getattr(args, complex_key))
    F = load_map(getattr(args, map_key), K) if getattr(args, map_key, None) else None
    return K, F


# -- simplex -------------------------------------------------------------------------

def cmd_simplex(args) -> int:
    T = load_simplex(args.simplex)
    cfg = _mc(args)
    if args.action == "angles":
        rows = []
        for idx, tau in enumerate(face_lattice(T)):
            a = interior_angle(T, tau, cfg.child(idx))
            rows.append([" ".join(map(str, tau.indices)), tau.dim, a.value, a.stderr])
        _emit(args, csv_text(["face", "dim", "value", "stderr"], rows))
    elif args.action == "volume":
        v = volume_hopf(T, cfg) if args.method == "hopf" else volume_mc(T, cfg)
        _emit(args, csv_text(["method", "value", "stderr"], [[args.method, v.value, v.stderr]]))
    else:
        W = generalized_angle_sum(T, cfg)
        _emit(args, csv_text(["dim", "value", "stderr"], [[T.m, W.value, W.stderr]]))
    return EXIT_OK


# -- complex -------------------------------------------------------------------------

def cmd_complex(args) -> int:
    K = load_complex(args.complex)
    rep = validate(K, closed=not args.open)
    if args.action == "validate":
        lines = [f"top simplices: {len(K.top)}", f"face classes: {len(K.face_classes)}" if rep.ok else ""]
        lines = [ln for ln in lines if ln] + [f"violation: {v}" for v in rep.violations]
        lines.append("valid" if rep.ok else "invalid")
        print("\n".join(lines))
        return EXIT_OK if rep.ok else EXIT_INVALID
    if not rep.ok:
        print("\n".join(f"violation: {v}" for v in rep.violations), file=sys.stderr)
        return EXIT_INVALID
    if args.action == "chi":
        print(sum((-1) ** c.dim for c in K.face_classes))
        return EXIT_OK
    if not 0 <= args.face < len(K.face_classes):
        raise UsageError(f"face id {args.face} out of range 0..{len(K.face_classes) - 1}")
    L = link_sphere(K, args.face, allow_cusp=args.allow_cusp)
    print(f"face: {args.face} {K.face_classes[args.face].label}")
    print(f"link dimension: {L.dim}")
    if L.complex is not None:
        print(f"link top simplices: {len(L.complex.top)}")
    if L.betti is not None:
        print("betti: " + " ".join(map(str, L.betti)))
    print(f"sphere: {'yes' if L.is_sphere else 'no'}")
    for r in L.reasons:
        print(f"reason: {r}")
    return EXIT_OK


# -- map -------------------------------------------------------------------------------

def cmd_map(args) -> int:
    K, F = _load(args)
    rep = validate(K)
    if not rep.ok:
        print("\n".join(f"violation: {v}" for v in rep.violations), file=sys.stderr)
        return EXIT_INVALID
    if args.action == "check":
        bad = F.consistency_errors()
        nd = nondegeneracy_check(F)
        for v in bad:
            print(f"inconsistent image: {v}")
        print(f"degenerate simplices: {len(nd.degenerate)} of {len(K.top)}")
        for s in nd.degenerate:
            print(f"degenerate: {s}")
        print(f"min singular ratio: {fmt(min(nd.ratios))}")
        print("consistent" if not bad else "inconsistent")
        return EXIT_OK if not bad else EXIT_INVALID
    classes = None
    if args.ends:
        from .cusp import moved_classes

        classes = sorted({c for e in args.ends for c in moved_classes(K, e)})
    G = perturb(F, args.radius, args.seed, classes)
    from .develop import map_to_json

    if args.out:
        save_map(args.out, G)
    else:
        import json

        sys.stdout.write(json.dumps(map_to_json(G), indent=1) + "\n")
    return EXIT_OK


# -- census / volume --------------------------------------------------------------------

def cmd_census(args) -> int:
    K, F = _load(args)
    rep = validate(K)
    if not rep.ok:
        print("\n".join(f"violation: {v}" for v in rep.violations), file=sys.stderr)
        return EXIT_INVALID
    faces = None if args.face is None else [args.face]
    entries = census_all(F, _mc(args), faces=faces, threads=args.threads)
    _emit(args, csv_text(CENSUS_COLUMNS, census_rows(entries)))
    if args.gnuplot:
        write_text(args.gnuplot, gnuplot_script(args.out or "census.csv", 1, 3, 4, "census by face"))
    for e in entries:
        if e.error:
            print(f"face {e.face}: {e.error}", file=sys.stderr)
    if any(e.error for e in entries):
        return EXIT_INVALID
    if any(not e.cusp and not e.certified for e in entries):
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_volume(args) -> int:
    K, F = _load(args)
    rep = validate(K)
    if not rep.ok:
        print("\n".join(f"violation: {v}" for v in rep.violations), file=sys.stderr)
        return EXIT_INVALID
    cfg = _mc(args)
    rows = []
    code = EXIT_OK
    try:
        if args.method in ("simplices", "both"):
            v = rep_volume_simplices(F, cfg)
            rows.append(["simplices", v.value, v.stderr, ""])
        if args.method in ("census", "both"):
            ir = integrality_report(F, cfg, args.denominator, threads=args.threads)
            half = sphere_volume(K.dim) / 2
            rows.append(["census", ir.normalized * half, ir.stderr * half, ""])
            rows.append(["normalized", ir.normalized, ir.stderr, ir.verdict])
            if ir.verdict == "uncertified":
                code = EXIT_UNCERTIFIED
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = csv_text(["route", "value", "stderr", "verdict"], rows)
    if args.report:
        write_text(args.report, text)
    sys.stdout.write(text)
    return code


def cmd_gauss_bonnet(args) -> int:
    K, F = _load(args)
    rep = validate(K)
    if not rep.ok:
        print("\n".join(f"violation: {v}" for v in rep.violations), file=sys.stderr)
        return EXIT_INVALID
    try:
        gb = gauss_bonnet_check(F, _mc(args), threads=args.threads)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"chi(compactified): {gb.chi_closed}")
    print(f"cusp points: {gb.cusps}")
    print(f"volume: {fmt(gb.volume.value)} +- {fmt(gb.volume.stderr)}")
    print(f"expected: {fmt(gb.expected)}")
    for e in gb.bad_entries:
        print(f"inconsistent face {e.face}: census {fmt(e.value)}")
    print("consistent" if gb.ok else "inconsistent")
    return EXIT_OK if gb.ok else EXIT_INVALID


# -- cusp lab ---------------------------------------------------------------------------

def _resolve(base: Path, ref):
    return ref if isinstance(ref, dict) else read_json(base / ref)


def cmd_cusp_limit(args) -> int:
    from .complex import complex_from_json
    from .develop import map_from_json

    path = Path(args.experiment)
    exp = read_json(path)
    K = complex_from_json(_resolve(path.parent, exp["complex"]))
    f0 = map_from_json(_resolve(path.parent, exp["map"]), K)
    seed = args.seed if args.seed is not None else int(exp.get("seed", 0))
    E = CuspExperiment.from_f0(f0, seed, exp.get("delta"))
    ks = []
    k = 1
    while k <= args.kmax:
        ks.append(k)
        k *= 2
    S = cusp_limit_experiment(E, ks, MCConfig(seed, args.samples), totals=not args.no_totals,
                              threads=args.threads)
    rows = []
    for row in S.rows:
        for f, e in sorted(row.cusp.items()):
            t = row.total
            rows.append([row.k, row.radius, f, e.value, e.stderr, S.C[f],
                         "" if t is None else fmt(t.value), "" if t is None else fmt(t.stderr)])
    header = ["k", "radius", "face_id", "value", "stderr", "C", "total", "total_stderr"]
    _emit(args, csv_text(header, rows))
    if args.gnuplot:
        write_text(args.gnuplot, gnuplot_script(args.out or "series.csv", 2, 4, 5, "cusp census against radius"))
    return EXIT_OK if all(S.envelope_ok.values()) else EXIT_INVALID


def cmd_cusp_covering(args) -> int:
    K = load_complex(args.base)
    Kc = load_complex(args.cover)
    F = load_map(args.base_map, K)
    Fc = load_map(args.cover_map, Kc)
    vm = read_json(args.vertex_map)
    R = covering_relation_check(F, Fc, vm, args.deg, _mc(args))
    for p in R.combinatorial:
        print(f"covering: {p}", file=sys.stderr)
    rows = [[fb, fc, args.deg, eb.value, eb.stderr, ec.value, ec.stderr, ok] for fb, fc, eb, ec, ok in R.pairs]
    header = ["base_face", "cover_face", "degree", "base_value", "base_stderr", "cover_value", "cover_stderr", "ok"]
    _emit(args, csv_text(header, rows))
    return EXIT_OK if R.ok else EXIT_INVALID


# -- fixtures ---------------------------------------------------------------------------

def _write_fixture(out: Path, f: fx.Fixture, prefix: str = ""):
    save_complex(out / f"{prefix}complex.json", f.complex)
    save_map(out / f"{prefix}map.json", f.map)


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    name = args.name
    if name == "genus2":
        _write_fixture(out, fx.genus2())
    elif name == "punctured_torus":
        _write_fixture(out, fx.punctured_torus(args.cone_angle))
    elif name == "winding_sphere":
        _write_fixture(out, fx.winding_sphere())
    elif name == "star4d":
        _write_fixture(out, fx.star4d(args.seed))
    elif name == "cone4d":
        f = fx.cone4d()
        _write_fixture(out, f)
        write_json(out / "experiment.json", {
            "complex": "complex.json", "map": "map.json", "seed": args.seed,
            "delta": delta_threshold(f.map),
        })
    elif name in ("cover2d", "cover4d"):
        base, cover, vm, d = fx.cover_pair_2d() if name == "cover2d" else fx.cover_pair_4d(seed=args.seed)
        _write_fixture(out, base, "base_")
        _write_fixture(out, cover, "cover_")
        write_json(out / "vertex_map.json", vm)
        write_json(out / "covering.json", {"degree": d})
    elif name.startswith("simplex"):
        m = int(name[-1])
        T = random_simplex(m, np.random.default_rng(args.seed), radius=args.radius)
        save_simplex(out / "simplex.json", T)
    else:
        raise UsageError(f"unknown fixture {name!r}")
    return EXIT_OK


FIXTURE_NAMES = ["genus2", "punctured_torus", "winding_sphere", "star4d", "cone4d", "cover2d", "cover4d",
                 "simplex2", "simplex3", "simplex4"]


def build_parser() -> Parser:
    common = Parser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--gnuplot", metavar="SCRIPT", help="also write a gnuplot script for the CSV")
    mc = Parser(add_help=False)
    mc.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    mc.add_argument("--seed", type=_seed, default=0)

    p = Parser(prog="hypvol", description="Volumes of representations from angle censuses.", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    s = sub.add_parser("simplex", parents=[common])
    ssub = s.add_subparsers(dest="action", required=True, parser_class=Parser)
    for name in ("angles", "volume", "gram-euler"):
        q = ssub.add_parser(name, parents=[common, mc])
        q.add_argument("--simplex", required=True)
        q.add_argument("--out")
        if name == "volume":
            q.add_argument("--method", choices=["hopf", "mc"], default="hopf")
    s.set_defaults(func=cmd_simplex)

    c = sub.add_parser("complex", parents=[common])
    csub = c.add_subparsers(dest="action", required=True, parser_class=Parser)
    for name in ("validate", "chi", "link"):
        q = csub.add_parser(name, parents=[common])
        q.add_argument("--complex", required=True)
        q.add_argument("--open", action="store_true", help="allow boundary facets")
        if name == "link":
            q.add_argument("--face", type=int, required=True)
            q.add_argument("--allow-cusp", action="store_true")
    c.set_defaults(func=cmd_complex)

    m = sub.add_parser("map", parents=[common])
    msub = m.add_subparsers(dest="action", required=True, parser_class=Parser)
    q = msub.add_parser("check", parents=[common])
    q.add_argument("--complex", required=True)
    q.add_argument("--map", required=True)
    q = msub.add_parser("perturb", parents=[common])
    q.add_argument("--complex", required=True)
    q.add_argument("--map", required=True)
    q.add_argument("--radius", type=float, required=True)
    q.add_argument("--seed", type=_seed, default=0)
    q.add_argument("--ends", type=int, nargs="*", help="only move vertices adjacent to these ends")
    q.add_argument("--out")
    m.set_defaults(func=cmd_map)

    q = sub.add_parser("census", parents=[common, mc])
    q.add_argument("--complex", required=True)
    q.add_argument("--map", required=True)
    q.add_argument("--face", type=int)
    q.add_argument("--out")
    q.set_defaults(func=cmd_census)

    q = sub.add_parser("volume", parents=[common, mc])
    q.add_argument("--complex", required=True)
    q.add_argument("--map", required=True)
    q.add_argument("--method", choices=["census", "simplices", "both"], default="both")
    q.add_argument("--denominator", type=_positive_int)
    q.add_argument("--report")
    q.set_defaults(func=cmd_volume)

    q = sub.add_parser("gauss-bonnet", parents=[common, mc])
    q.add_argument("--complex", required=True)
    q.add_argument("--map", required=True)
    q.set_defaults(func=cmd_gauss_bonnet)

    cl = sub.add_parser("cusp-lab", parents=[common])
    clsub = cl.add_subparsers(dest="action", required=True, parser_class=Parser)
    q = clsub.add_parser("limit", parents=[common])
    q.add_argument("--experiment", required=True)
    q.add_argument("--kmax", type=_positive_int, default=16)
    q.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    q.add_argument("--seed", type=_seed)
    q.add_argument("--no-totals", action="store_true", help="only the cusp censuses, not the full sum")
    q.add_argument("--out")
    q.set_defaults(func=cmd_cusp_limit)
    q = clsub.add_parser("covering", parents=[common, mc])
    q.add_argument("--base", required=True)
    q.add_argument("--base-map", required=True)
    q.add_argument("--cover", required=True)
    q.add_argument("--cover-map", required=True)
    q.add_argument("--vertex-map", required=True)
    q.add_argument("--deg", type=_positive_int, required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_cusp_covering)

    f = sub.add_parser("fixtures", parents=[common])
    fsub = f.add_subparsers(dest="action", required=True, parser_class=Parser)
    q = fsub.add_parser("emit", parents=[common])
    q.add_argument("name", choices=FIXTURE_NAMES)
    q.add_argument("--out", required=True)
    q.add_argument("--seed", type=_seed, default=0)
    q.add_argument("--cone-angle", type=float, default=0.0)
    q.add_argument("--radius", type=float, default=1.0)
    q.set_defaults(func=cmd_fixtures)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (InvalidComplexError, UnsupportedError, KeyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

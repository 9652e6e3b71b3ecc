"""Command line front end.

    rim solve  --problem wilkinson --region=-2,22,-1,1 --eps 1e-12
    rim oracle disc-te --kmax 6
    rim export --problem te-square --h 0.05 --out-a A.mtx --out-b B.mtx
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict
from pathlib import Path

from . import bessel, fem2d
from .pencil import Pencil, PencilError, example3_pencil, load_matrix_market, save_matrix_market, wilkinson_pencil
from .projector import Rectangle
from .search import MaxDepthExceeded, RegionSolveError, SearchConfig, rim

logger = logging.getLogger("rimeig")

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_MAX_DEPTH = 4

PROBLEMS = ("te-disc", "te-square", "neumann-square", "example3", "wilkinson", "files")

# mesh defaults per problem: (h, jitter)
MESH_DEFAULTS = {
    "te-disc": (0.04, 0.0),
    "te-square": (0.05, 0.0),
    "neumann-square": (0.025, 0.2),
}


def build_problem(args) -> tuple[Pencil, dict]:
    """Pencil for ``args.problem`` plus a description of how it was built."""
    problem = args.problem
    meta: dict = {"problem": problem}
    if problem == "example3":
        meta.update(size=args.size, num_ones=args.num_ones)
        return example3_pencil(args.size, args.num_ones), meta
    if problem == "wilkinson":
        meta.update(size=args.size)
        return wilkinson_pencil(args.size), meta
    if problem == "files":
        if not args.a or not args.b:
            raise PencilError("--problem files needs --a and --b")
        meta.update(a=str(args.a), b=str(args.b))
        return load_matrix_market(args.a, args.b), meta
    h_default, jitter_default = MESH_DEFAULTS[problem]
    h = args.h if args.h is not None else h_default
    jitter = args.jitter if args.jitter is not None else jitter_default
    if problem == "te-disc":
        mesh = fem2d.disc_mesh(0.5, h)
    else:
        mesh = fem2d.square_mesh(h, jitter, args.mesh_seed)
    fem = fem2d.assemble(mesh, args.index)
    meta.update(h=h, jitter=jitter, mesh_seed=args.mesh_seed, index=args.index,
                vertices=len(mesh.vertices), interior=mesh.num_interior, boundary=mesh.num_boundary)
    if args.mesh_out:
        mesh.save(args.mesh_out)
    pencil = fem2d.neumann_pencil(fem) if problem == "neumann-square" else fem2d.te_pencil(fem)
    meta["dimension"] = pencil.n
    return pencil, meta


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def eigen_document(report) -> str:
    doc = {"complete": report.complete,
           "eigenvalues": [{"re": z.real, "im": z.imag, "cluster_box_count": k}
                           for z, k in zip(report.eigenvalues, report.cluster_sizes)]}
    return json.dumps(doc, indent=2) + "\n"


def cmd_solve(args) -> int:
    pencil, meta = build_problem(args)
    region = Rectangle.parse(args.region)
    config = SearchConfig(epsilon=args.eps, num_vectors=args.vectors, amplifier=args.amplifier,
                          threshold=args.threshold, seed=args.seed, max_depth=args.max_depth)
    t0 = time.perf_counter()
    status = EXIT_OK
    try:
        report = rim(pencil, region, config)
    except MaxDepthExceeded as exc:
        logger.error("%s", exc)
        report = exc.report
        status = EXIT_MAX_DEPTH
    except RegionSolveError as exc:
        logger.error("%s", exc)
        return EXIT_SOLVER
    elapsed = time.perf_counter() - t0
    _write(args.out, eigen_document(report))
    if args.log:
        with open(args.log, "w") as fh:
            report.write_region_log(fh)
    if args.meta:
        run = {"seed": config.seed, "config": asdict(config), "region": region.as_tuple(),
               "problem": meta, "timings": {"search_seconds": elapsed}, "stats": asdict(report.stats)}
        Path(args.meta).write_text(json.dumps(run, indent=2) + "\n")
    return status


def cmd_oracle(args) -> int:
    if args.kind == "disc-te":
        roots = bessel.disc_te_roots(args.kmax, args.mmax)
        doc = {"roots": [{"k": r.k, "order_m": r.order_m, "lambda": r.lam} for r in roots]}
    else:
        doc = {"m": args.m, "index": args.index, "zero": bessel.bessel_zero(args.m, args.index)}
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_export(args) -> int:
    pencil, meta = build_problem(args)
    save_matrix_market(pencil, args.out_a, args.out_b)
    logger.info("wrote %s, %s (%s)", args.out_a, args.out_b, meta)
    return EXIT_OK


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--a", type=Path, help="Matrix Market file for A (problem 'files')")
    p.add_argument("--b", type=Path, help="Matrix Market file for B (problem 'files')")
    p.add_argument("--h", type=float, help="target mesh size")
    p.add_argument("--jitter", type=float, help="interior vertex jitter, fraction of a cell")
    p.add_argument("--mesh-seed", type=int, default=0)
    p.add_argument("--index", type=float, default=16.0, help="index of refraction n")
    p.add_argument("--size", type=int, help="matrix size for example3/wilkinson")
    p.add_argument("--num-ones", type=int, default=20)
    p.add_argument("--mesh-out", type=Path, help="also write the mesh as text")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rim", description="Recursive integral eigenvalue search")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="locate the eigenvalues inside a rectangle")
    _add_problem_args(solve)
    solve.add_argument("--region", required=True, help="re_min,re_max,im_min,im_max")
    solve.add_argument("--eps", type=float, required=True)
    solve.add_argument("--vectors", type=int, default=3)
    solve.add_argument("--amplifier", type=float, default=10.0)
    solve.add_argument("--threshold", type=float, default=None, help="default amplifier/10")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--max-depth", type=int, default=60)
    solve.add_argument("--out", default="-", help="eigenvalue JSON (default stdout)")
    solve.add_argument("--log", type=Path, help="region log, one JSON record per line")
    solve.add_argument("--meta", type=Path, help="run metadata JSON")
    solve.set_defaults(func=cmd_solve)

    oracle = sub.add_parser("oracle", help="analytic reference values")
    oracle.add_argument("kind", choices=("disc-te", "bessel-zero"))
    oracle.add_argument("--kmax", type=float, default=6.0)
    oracle.add_argument("--mmax", type=int, default=20)
    oracle.add_argument("--m", type=int, default=0)
    oracle.add_argument("--index", type=int, default=1)
    oracle.add_argument("--out", default="-")
    oracle.set_defaults(func=cmd_oracle)

    export = sub.add_parser("export", help="write a built-in pencil as Matrix Market files")
    _add_problem_args(export)
    export.add_argument("--out-a", type=Path, required=True)
    export.add_argument("--out-b", type=Path, required=True)
    export.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "size", None) is None and getattr(args, "problem", None) in ("example3", "wilkinson"):
        args.size = 100 if args.problem == "example3" else 40
    try:
        return args.func(args)
    except (OSError, PencilError, fem2d.MeshError) as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

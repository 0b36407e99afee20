"""Command-line front end.

    symdefect defect mub 4
    symdefect defect path/to/vectors.json
    symdefect tables 2 --format json
    symdefect robustness sic 4 --grid 1e-8:1e-1:15 --samples 8
    symdefect family sic 3
    symdefect verify vectors.json --symmetry etf

Exit codes: 0 success, 1 mismatch against a reference table, 2 invalid input
structure, 64 usage error.  Reports never contain timings, so identical
invocations produce identical output.  BLAS threading follows the usual
``OMP_NUM_THREADS`` / ``OPENBLAS_NUM_THREADS`` variables.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from ._format import fmt6, fmt17, json_text
from .constructions import get_structure, mub_symmetry, etf_symmetry, registry
from .core import DEFAULT_TOLERANCES, HermitianUnitary, StructureError, VectorSet, unitary_from_vectors, verify_povm, verify_symmetry
from .defect import kernel_basis, build_linear_system, restricted_defect
from .family import export_family, find_exact_lines, sic3_base, sic3_families
from .io import VectorFileError, load_vector_file
from .robustness import confidence_region, parse_grid, singular_sweep
from .tables import run_table

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_USAGE = 64

FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    tolerance: float = DEFAULT_TOLERANCES.rank
    seed: int = 0
    samples: int = 8
    output: str | None = None
    format: str = "text"
    long_running_ok: bool = False

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise UsageError("--tol must be positive")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if self.format not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=DEFAULT_TOLERANCES.rank, help="relative rank threshold (default 1e-8)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--samples", type=int, default=8, help="perturbations per grid point")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--long-running", action="store_true", help="include long-running cases")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="symdefect", description="Restricted defect and isolation of symmetric POVMs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kinds = "; ".join(registry().values())
    d = sub.add_parser("defect", parents=[common], help="restricted defect of a structure or vector file")
    d.add_argument("structure", nargs="+", help=f"vector file or structure spec ({kinds})")
    d.add_argument("--gauge-row", type=int, default=0, help="row whose pairs are gauge-fixed (-1: none)")
    d.add_argument("--method", choices=("auto", "dense", "iterative"), default="auto")

    t = sub.add_parser("tables", parents=[common], help="reproduce reference tables 1-3")
    t.add_argument("which", nargs="*", default=["1", "2", "3"], help="table numbers (default: all)")

    r = sub.add_parser("robustness", parents=[common], help="singular-value sweep under random perturbations")
    r.add_argument("structure", nargs="+")
    r.add_argument("--grid", default="1e-8:1e-1:15", help="LO:HI:COUNT (log-spaced) or comma list")
    r.add_argument("--gauge-row", type=int, default=-1, help="gauge row for the sweep system (-1: none)")

    f = sub.add_parser("family", parents=[common], help="search and verify exact one-parameter families")
    f.add_argument("structure", nargs="+")
    f.add_argument("--starts", type=int, default=200, help="random starts for the direction search")
    f.add_argument("--points", type=int, default=256, help="t-grid points per period")
    f.add_argument("--export-dir", default=None, help="write one CSV per verified family")

    v = sub.add_parser("verify", parents=[common], help="validate a vector file")
    v.add_argument("file")
    v.add_argument("--symmetry", default="auto", help="etf | mub:M | none | auto (guess from d, N)")
    return p


# --------------------------------------------------------------------------


def _resolve(spec: Sequence[str]) -> tuple[str, VectorSet | HermitianUnitary, float | None]:
    """``(name, payload, declared accuracy)`` from a file path or structure spec."""
    if len(spec) == 1 and (os.path.exists(spec[0]) or spec[0].endswith(".json")):
        vf = load_vector_file(spec[0])
        return os.path.basename(spec[0]), vf.vectors, vf.accuracy
    kind, *args = spec
    if kind not in registry():
        raise UsageError(f"unknown structure {kind!r}; known: {', '.join(registry())}")
    try:
        st = get_structure(kind, *args)
    except (IndexError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot build {' '.join(spec)}: {exc}") from None
    return st.name, st.payload, st.accuracy or None


def _unitary(payload: VectorSet | HermitianUnitary) -> HermitianUnitary:
    if isinstance(payload, HermitianUnitary):
        payload.validate()
        return payload
    return unitary_from_vectors(payload)


def _emit(text: str, cfg: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kv_csv(d: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in d.items():
        if isinstance(v, float):
            v = fmt17(v)
        elif isinstance(v, (list, tuple)):
            v = ";".join(fmt17(x) if isinstance(x, float) else str(x) for x in v)
        w.writerow([k, v])
    return buf.getvalue()


def _stable(d: dict) -> dict:
    return {k: v for k, v in d.items() if k != "elapsed"}


def cmd_defect(args, cfg: RunConfig) -> int:
    name, payload, accuracy = _resolve(args.structure)
    U = _unitary(payload)
    gauge_row = None if args.gauge_row < 0 else args.gauge_row
    rep = restricted_defect(U, cfg.tolerance, gauge_row, method=args.method, seed=cfg.seed)
    data = {"structure": name, **_stable(rep.to_dict())}
    region = None
    if accuracy is not None and rep.sigma1 is not None and U.N > 2 * U.d:
        region = confidence_region(rep.sigma1, U.d, U.N, accuracy)
        data.update(accuracy=accuracy, s_max=region.s_max, f_value=region.f_value, certified=region.certified)
    if cfg.format == "json":
        _emit(json_text(data), cfg)
    elif cfg.format == "csv":
        _emit(_kv_csv(data), cfg)
    else:
        lines = [f"{name}: {rep.summary()}"]
        lines += [f"  note: {f}" for f in rep.flags]
        if region is not None:
            lines.append(f"  confidence region: {region.describe()} (declared accuracy {fmt6(accuracy)})")
        _emit("\n".join(lines), cfg)
    return EXIT_OK


def cmd_tables(args, cfg: RunConfig) -> int:
    try:
        which = [int(w) for w in args.which]
    except ValueError:
        raise UsageError("tables takes numbers 1, 2, 3") from None
    if any(w not in (1, 2, 3) for w in which):
        raise UsageError("tables takes numbers 1, 2, 3")
    results = [run_table(w, cfg.tolerance, cfg.long_running_ok) for w in which]
    if cfg.format == "json":
        out = {f"table{r.table}": [_stable(row) for row in r.rows()] for r in results}
        _emit(json_text(out), cfg)
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table", "cell", "reference", "computed", "status", "detail"])
        for r in results:
            for row in r.rows():
                w.writerow([r.table, row["cell"], row["reference"], "" if row["computed"] is None else row["computed"], row["status"], row["detail"]])
        _emit(buf.getvalue(), cfg)
    else:
        _emit("\n\n".join(r.text() for r in results), cfg)
    return EXIT_OK if all(r.ok for r in results) else EXIT_MISMATCH


def cmd_robustness(args, cfg: RunConfig) -> int:
    try:
        grid = parse_grid(args.grid)
    except ValueError as exc:
        raise UsageError(f"invalid --grid: {exc}") from None
    name, payload, _ = _resolve(args.structure)
    if not isinstance(payload, VectorSet):
        raise UsageError("robustness needs a vector structure")
    _unitary(payload)
    gauge_row = None if args.gauge_row < 0 else args.gauge_row
    rep = singular_sweep(payload, grid, cfg.samples, cfg.seed, cfg.tolerance, gauge_row, name)
    if cfg.format == "json":
        data = {k: getattr(rep, k) for k in rep.__dataclass_fields__}
        data["crossover"] = rep.crossover()
        _emit(json_text(data), cfg)
    else:
        _emit(rep.to_csv(), cfg)
    return EXIT_OK


def cmd_family(args, cfg: RunConfig) -> int:
    name, payload, _ = _resolve(args.structure)
    U = _unitary(payload)
    rep = restricted_defect(U, cfg.tolerance, 0)
    lines = [f"{name}: kernel dimension {rep.nullity} (gauge {rep.gauge_dim}, free parameters {rep.free_parameters})"]
    data: dict = {"structure": name, "kernel_dimension": rep.nullity, "gauge_dim": rep.gauge_dim, "free_parameters": rep.free_parameters}
    fams = []
    if rep.free_parameters == 0:
        lines.append("no kernel directions beyond gauge")
    else:
        L = build_linear_system(U, 0)
        realness = "vacuous (real kernel)" if len(kernel_basis(L, cfg.tolerance)) == rep.nullity else "applied"
        lines.append(f"realness condition: {realness}")
        is_sic3 = args.structure[:2] == ["sic", "3"]
        if is_sic3:
            fams = sic3_families(args.starts, cfg.seed, args.points)
        else:
            fams = find_exact_lines(U, 0, args.starts, cfg.seed, 4, args.points)
        if not fams:
            lines.append("no verified family found")
        for fm in fams:
            coords = " ".join(f"{k}={fmt6(v)}" for k, v in fm.coordinates.items())
            nz = int((fm.direction.R != 0).sum() // 2)
            lines.append(f"{fm.label}: max residual {fmt6(fm.max_residual)} over {len(fm.t_grid)} points, {nz} modulated pairs {coords}".rstrip())
        lines.append(f"{len(fams)} verified famil{'y' if len(fams) == 1 else 'ies'}")
        data["families"] = [
            {"label": fm.label, "max_residual": fm.max_residual, "points": len(fm.t_grid), "coordinates": fm.coordinates} for fm in fams
        ]
    if args.export_dir:
        os.makedirs(args.export_dir, exist_ok=True)
        for fm in fams:
            with open(os.path.join(args.export_dir, f"{fm.label}.csv"), "w", encoding="utf-8") as fh:
                fh.write(export_family(fm, name))
    _emit(json_text(data) if cfg.format == "json" else "\n".join(lines), cfg)
    return EXIT_OK


def _symmetry_for(spec: str, v: VectorSet):
    if spec == "none":
        return None
    if spec == "etf" or (spec == "auto" and v.N == v.d * v.d):
        return etf_symmetry(v.d, v.N)
    if spec.startswith("mub"):
        m = int(spec.split(":")[1]) if ":" in spec else v.N // v.d
        return mub_symmetry(v.d, m)
    if spec == "auto":
        return None
    raise UsageError(f"unknown symmetry spec {spec!r}")


def cmd_verify(args, cfg: RunConfig) -> int:
    vf = load_vector_file(args.file)
    v = vf.vectors
    S = _symmetry_for(args.symmetry, v)
    povm = verify_povm(v)
    sym = verify_symmetry(v, S) if S is not None else None
    limit = max(DEFAULT_TOLERANCES.povm, 10 * (vf.accuracy or 0.0))
    ok = povm <= limit and (sym is None or sym <= limit)
    data: dict = {"file": os.path.basename(args.file), "d": v.d, "N": v.N, "povm_residual": povm}
    lines = [f"{data['file']}: d={v.d} N={v.N}", f"  frame residual {fmt6(povm)} (limit {fmt6(limit)})"]
    if S is not None:
        data["symmetry"] = S.kind
        data["symmetry_deviation"] = sym
        lines.append(f"  {S.kind} symmetry deviation {fmt6(sym)}")
    if ok and vf.accuracy is not None and v.N > 2 * v.d:
        rep = restricted_defect(unitary_from_vectors(v, DEFAULT_TOLERANCES.with_(povm=limit, unit=limit)), cfg.tolerance)
        if rep.sigma1 is not None:
            region = confidence_region(rep.sigma1, v.d, v.N, vf.accuracy)
            data.update(accuracy=vf.accuracy, free_parameters=rep.free_parameters, sigma1=rep.sigma1, s_max=region.s_max, certified=region.certified)
            lines.append(f"  free parameters {rep.free_parameters}; confidence region: {region.describe()}")
    data["valid"] = ok
    lines.append("  PASS" if ok else "  FAIL: structure does not satisfy the declared symmetry")
    _emit(json_text(data) if cfg.format == "json" else "\n".join(lines), cfg)
    return EXIT_OK if ok else EXIT_INVALID


COMMANDS = {"defect": cmd_defect, "tables": cmd_tables, "robustness": cmd_robustness, "family": cmd_family, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.tol, args.seed, args.samples, args.out, args.format, args.long_running)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"symdefect: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StructureError, VectorFileError) as exc:
        print(f"symdefect: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

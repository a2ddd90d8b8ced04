"""``lrmlab`` command line: JSON results on stdout, a one-line summary on stderr.

Exit status is 0 whenever a result is produced (``inconclusive`` included) and 2
on invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from typing import Sequence

import numpy as np

from . import codes, epr, magic, phase
from .errors import LrmError
from .pauli import render_pauli
from .stabilizer import BRUTE_DISTANCE_MAX_N, StabilizerCode, brute_distance

EXIT_OK = 0
EXIT_INPUT = 2


class CliError(Exception):
    pass


def _default_threads() -> int:
    raw = os.environ.get("LRMLAB_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        raise CliError(f"LRMLAB_THREADS must be a positive integer, got {raw!r}")
    return value


# --------------------------------------------------------------------------- argument helpers


def _load(args: argparse.Namespace) -> StabilizerCode:
    if getattr(args, "file", None):
        try:
            return codes.load_code(args.file)
        except OSError as exc:
            raise CliError(f"cannot read code file {args.file}: {exc.strerror}") from exc
    if getattr(args, "code", None):
        return codes.builtin_code(args.code)
    raise CliError("give a code with --code NAME or --file PATH")


def _region(code: StabilizerCode, text: str) -> tuple[int, ...]:
    kind, _, idx = text.partition(":")
    if kind.lower() in ("xbar", "zbar") and idx:
        basis = code.require_logicals()
        if not idx.isdigit():
            raise CliError(f"bad logical index in region {text!r}")
        i = int(idx) - 1
        if not 0 <= i < basis.k:
            raise CliError(f"logical index {idx} out of range 1..{basis.k}")
        ops = basis.logical_x if kind.lower() == "xbar" else basis.logical_z
        return tuple(s for s in range(code.n) if ops[i].support_mask >> s & 1)
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise CliError(f"bad region {text!r}; use xbar:i, zbar:i or a comma list of sites") from exc


def _state(k: int, args: argparse.Namespace) -> magic.LogicalState:
    spec = args.state
    if spec == "plus":
        st = magic.LogicalState.plus(k)
    elif spec == "zero":
        st = magic.LogicalState.zero(k)
    elif spec.startswith("bloch:"):
        try:
            vecs = [tuple(float(c) for c in v.split(",")) for v in spec[6:].split(";")]
        except ValueError as exc:
            raise CliError(f"bad Bloch vectors in {spec!r}") from exc
        st = magic.LogicalState.product(vecs)
    else:
        raise CliError(f"unknown state {spec!r}; expected plus, zero or bloch:x,y,z;...")
    if st.k != k:
        raise CliError(f"state has {st.k} logical qubits, the code encodes {k}")
    if getattr(args, "gate", None):
        st = _gate(args, k).apply(st)
    return st


def _gate(args: argparse.Namespace, k: int) -> magic.GateSpec:
    if getattr(args, "gate_matrix", None):
        try:
            with open(args.gate_matrix, encoding="utf-8") as fh:
                raw = json.load(fh)
            mat = np.array([[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in raw])
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
            raise CliError(f"cannot read gate matrix {args.gate_matrix}: {exc}") from exc
        return magic.GateSpec.dense(mat)
    if args.logical is None:
        raise CliError("--gate needs --logical i (1-based)")
    if not 1 <= args.logical <= k:
        raise CliError(f"logical index {args.logical} out of range 1..{k}")
    return magic.GateSpec.single(args.gate, args.logical - 1)


def _point(args: argparse.Namespace) -> epr.CorrelationPoint:
    return epr.CorrelationPoint(epr.as_fraction(args.b), epr.as_fraction(args.c))


# --------------------------------------------------------------------------- commands


def cmd_code(args: argparse.Namespace) -> tuple[object, str]:
    if args.action == "build":
        code = _load(args)
        doc = codes.code_to_dict(code)
        if args.out:
            codes.save_code(code, args.out)
            return {"written": args.out, "n": code.n, "k": code.k}, f"wrote {code.name} to {args.out}"
        return doc, f"{code.name}: n={code.n} k={code.k}"
    if args.action == "validate":
        try:
            code = _load(args)
        except LrmError as exc:
            return {"valid": False, "message": str(exc)}, f"invalid: {exc}"
        return {"valid": True, "n": code.n, "k": code.k, "rank": code.group.rank}, "valid"
    code = _load(args)
    info = {
        "name": code.name,
        "n": code.n,
        "k": code.k,
        "rank": code.group.rank,
        "generators": len(code.group.generators),
        "max_generator_weight": max(bin(g.support_mask).count("1") for g in code.group.generators),
    }
    if code.logicals is not None:
        info["logical_x_weights"] = [bin(p.support_mask).count("1") for p in code.logicals.logical_x]
        info["logical_z_weights"] = [bin(p.support_mask).count("1") for p in code.logicals.logical_z]
    if code.n <= BRUTE_DISTANCE_MAX_N and code.k:
        info["distance"] = brute_distance(code)
    return info, f"{code.name}: [[{code.n},{code.k}]]"


def cmd_magic(args: argparse.Namespace) -> tuple[object, str]:
    code = _load(args)
    basis = code.require_logicals()
    if args.action == "f-support":
        region = _region(code, args.region)
        rep = magic.f_support(code, _state(basis.k, args), region, args.tolerance, args.threads)
        return rep.to_dict(), f"f = {rep.f_value:.12g} ({rep.verdict})"
    if args.action == "test-transversal":
        gate = _gate(args, basis.k)
        rep = magic.transversal_report(code, gate, args.tolerance, seed=args.seed, workers=args.threads)
        out = rep.to_dict()
        summary = rep.verdict
        if rep.witness is not None:
            summary += f", witness f = {rep.witness.f_value:.12g} on {rep.witness_region_label}"
        return out, summary
    if args.action == "uniqueness":
        region = _region(code, args.region)
        found = magic.uniqueness_scan(code, region, args.threads)
        reps = {render_pauli(p): f"Xbar_{i + 1}" for i, p in enumerate(basis.logical_x)}
        reps.update({render_pauli(p): f"Zbar_{i + 1}" for i, p in enumerate(basis.logical_z)})
        elems = [{"pauli": render_pauli(p), "matches": reps.get(render_pauli(p))} for p in found]
        return {"region": list(region), "count": len(found), "elements": elems}, f"{len(found)} element(s)"
    # spectrum
    state = _state(basis.k, args)
    counts = Counter(round(v, 12) + 0.0 for _, v in magic.pauli_spectrum(code, state))
    values = [{"value": v, "count": c} for v, c in sorted(counts.items())]
    return {"normalizer_size": sum(counts.values()), "values": values}, f"{len(values)} distinct values"


def cmd_epr(args: argparse.Namespace) -> tuple[object, str]:
    if args.action == "feasible":
        cert = epr.feasible(_point(args), args.k, with_witness=False)
        tag = "feasible" if cert.feasible else f"infeasible ({cert.violated.constraint})"
        return cert.to_dict(), tag
    if args.action == "min-k":
        k = epr.min_epr(_point(args), args.k_max)
        return {"b": str(epr.as_fraction(args.b)), "c": str(epr.as_fraction(args.c)),
                "k_max": args.k_max, "min_k": k}, f"min K = {k}"
    if args.action == "povm":
        e, f = epr.construct_povm(_point(args), args.k)
        return {"K": args.k, "E": [str(v) for v in e], "F": [str(v) for v in f]}, "witness verified"
    if args.action == "boundary":
        pts = epr.region_boundary(args.k, args.samples)
        if args.format == "csv":
            return epr.boundary_csv(pts), f"{len(pts)} boundary points"
        return [p.__dict__ for p in pts], f"{len(pts)} boundary points"
    diag = epr.diagnose_family(args.family, args.k_max)
    return diag.to_dict(), diag.verdict


def _local_config(text: str) -> list[int]:
    try:
        return [int(q) for q in text.split(",") if q.strip()]
    except ValueError as exc:
        raise CliError(f"bad local configuration {text!r}; use e.g. 2 or 2,3") from exc


def cmd_phase(args: argparse.Namespace) -> tuple[object, str]:
    dims = _local_config(args.local_config) if args.local_config else None
    if args.action == "verdict":
        if args.gsd is not None:
            value = args.gsd
        elif args.model and args.genus:
            value = phase.gsd(phase.AnyonModel.parse(args.model), args.genus).gsd
        else:
            raise CliError("phase verdict needs --gsd N or --model and --genus")
        if dims is None:
            raise CliError("phase verdict needs --local-config")
        verdict = phase.strong_lrm_verdict(value, dims)
        return {"gsd": value, "local_config": dims, "verdict": verdict}, f"verdict {verdict}"
    if not args.model or not args.genus:
        raise CliError("phase gsd needs --model and --genus")
    rep = phase.gsd(phase.AnyonModel.parse(args.model), args.genus)
    return rep.to_dict(dims, factor=not args.no_factor), f"gsd = {rep.gsd}"


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker count (default: $LRMLAB_THREADS or 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled inputs")
    common.add_argument("--output", help="write the result here instead of stdout")

    code_src = argparse.ArgumentParser(add_help=False)
    code_src.add_argument("--code", help="gross, toric2d:L, toric3d:L, repetition:n, five-one-three, steane")
    code_src.add_argument("--file", help="code JSON file")

    parser = argparse.ArgumentParser(prog="lrmlab", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    p_code = top.add_parser("code", help="build, validate or describe stabilizer codes")
    sub = p_code.add_subparsers(dest="action", required=True)
    b = sub.add_parser("build", parents=[common, code_src])
    b.add_argument("--name", dest="code", help="alias of --code")
    b.add_argument("--out", help="write the code JSON to this path")
    sub.add_parser("validate", parents=[common, code_src])
    sub.add_parser("info", parents=[common, code_src])

    p_magic = top.add_parser("magic", help="Pauli-spectrum tests on encoded states")
    sub = p_magic.add_subparsers(dest="action", required=True)
    gate_opts = argparse.ArgumentParser(add_help=False)
    gate_opts.add_argument("--gate", help="T, Tdg, sqrtT, phase:<radians>, X, Y, Z, H, S, Sdg")
    gate_opts.add_argument("--logical", type=int, help="1-based logical qubit for --gate")
    gate_opts.add_argument("--gate-matrix", help="JSON file with a dense k-qubit unitary (k <= 6)")
    tol = argparse.ArgumentParser(add_help=False)
    tol.add_argument("--tolerance", type=float, default=magic.DEFAULT_TOLERANCE)
    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--state", default="plus", help="plus, zero or bloch:x,y,z;... before --gate")
    f = sub.add_parser("f-support", parents=[common, code_src, gate_opts, tol, state])
    f.add_argument("--region", required=True, help="xbar:i, zbar:i or comma-separated sites")
    sub.add_parser("test-transversal", parents=[common, code_src, gate_opts, tol])
    u = sub.add_parser("uniqueness", parents=[common, code_src])
    u.add_argument("--region", required=True)
    sub.add_parser("spectrum", parents=[common, code_src, gate_opts, state])

    p_epr = top.add_parser("epr", help="EPR-pair correlation region")
    sub = p_epr.add_subparsers(dest="action", required=True)
    point = argparse.ArgumentParser(add_help=False)
    point.add_argument("--b", required=True, help="<P x P>; decimals and fractions are read exactly")
    point.add_argument("--c", required=True, help="<P x I> = <I x P>")
    for name in ("feasible", "povm"):
        s = sub.add_parser(name, parents=[common, point])
        s.add_argument("--k", type=int, required=True)
    s = sub.add_parser("min-k", parents=[common, point])
    s.add_argument("--k-max", type=int, default=20)
    s = sub.add_parser("boundary", parents=[common])
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--samples", type=int, default=64)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s = sub.add_parser("diagnose", parents=[common])
    s.add_argument("--family", required=True, help="cnz or ghz(alpha)")
    s.add_argument("--k-max", type=int, default=3)

    p_phase = top.add_parser("phase", help="ground-space degeneracy and the prime-factor test")
    sub = p_phase.add_subparsers(dest="action", required=True)
    for name in ("gsd", "verdict"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--model", help="fibonacci, s3, toric or dims:<list>")
        s.add_argument("--genus", type=int)
        s.add_argument("--local-config", help="comma-separated local dimensions, e.g. 2")
    sub.choices["gsd"].add_argument("--no-factor", action="store_true", help="skip prime factorization")
    sub.choices["verdict"].add_argument("--gsd", type=int)
    return parser


_COMMANDS = {"code": cmd_code, "magic": cmd_magic, "epr": cmd_epr, "phase": cmd_phase}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = _default_threads()
        if args.threads < 1:
            raise CliError(f"--threads must be at least 1, got {args.threads}")
        result, summary = _COMMANDS[args.group](args)
    except (CliError, LrmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = result if isinstance(result, str) else json.dumps(result, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

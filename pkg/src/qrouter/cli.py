"""Command-line front end.

Subcommands: sweep (gamma sweep with CSV/JSON emission), tomo (reconstruct a
density matrix from a counts file), transpile (lower a circuit JSON and print
the equivalence report), calibrate (emit a calibration matrix), dump-ideal
(write the noiseless routed state's density matrix).
"""

import argparse
import json
import sys

import numpy as np

from .circuit import circuit_from_json
from .config import parse_config
from .errors import QRouterError
from .experiment import ideal_density
from .sim import NoiseSpec
from .sweep import density_matrix_json, run_sweep
from .tomo import build_calibration, expectations_from_counts, reconstruct
from .transpile import CouplingMap, decompose_to_basis, route, verify_equivalence


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _emit(doc, out):
    text = json.dumps(doc, indent=1, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        print(text)


def _resolve_map(spec):
    if spec == "jakarta":
        return CouplingMap.jakarta()
    doc = _load_json(spec)
    return CouplingMap(doc["n_physical"], tuple(tuple(e) for e in doc["edges"]))


def _cmd_sweep(args):
    doc = _load_json(args.config) if args.config else {}
    if args.seed is not None:
        doc["base_seed"] = args.seed
    if args.shots is not None:
        doc["shots_per_setting"] = args.shots
    if args.variant is not None:
        doc["variant"] = args.variant
    if args.no_mitigation:
        doc["mitigation"] = False
    if args.transpile:
        doc["transpile"] = True
    if args.map is not None:
        doc["coupling_map"] = args.map if args.map == "jakarta" else _load_json(args.map)
    config = parse_config(doc)
    report = run_sweep(config, out_dir=args.out)
    for row in report.rows:
        print(
            f"gamma={row.gamma:g} mean_F={row.mean_F:.4f} mean_P={row.mean_P_est:.4f} "
            f"P_theory={row.P_theory:.4f}"
        )
    return 0


def _cmd_tomo(args):
    doc = _load_json(args.counts)
    counts = {tuple(k): v for k, v in doc["settings"].items()}
    rho = reconstruct(expectations_from_counts(counts))
    _emit(density_matrix_json(rho), args.out)
    return 0


def _cmd_transpile(args):
    circ = circuit_from_json(_load_json(args.infile))
    cmap = _resolve_map(args.map)
    layout = None
    if args.layout:
        layout = [int(x) for x in args.layout.split(",")]
    result = route(decompose_to_basis(circ), cmap, layout)
    doc = {
        "swap_count": result.swap_count,
        "cx_count": result.cx_count,
        "depth": result.depth,
        "final_permutation": {str(k): v for k, v in sorted(result.final_permutation.items())},
    }
    if circ.is_unitary_only and circ.n_qubits <= 12:
        report = verify_equivalence(circ, result)
        doc["equivalent"] = report.equivalent
        doc["max_deviation"] = report.max_deviation
    _emit(doc, args.out)
    return 0


def _cmd_calibrate(args):
    pairs = ((args.p01, args.p10),) * args.qubits
    noise = NoiseSpec(pairs, rng_seed=args.seed)
    m = build_calibration(args.qubits, noise, shots=args.shots)
    _emit({"dim": m.shape[0], "matrix": np.asarray(m).tolist()}, args.out)
    return 0


def _cmd_dump_ideal(args):
    _emit(density_matrix_json(ideal_density()), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="qrouter", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="run a gamma sweep and write CSV/JSON results")
    sp.add_argument("--config", help="JSON config file (defaults apply when omitted)")
    sp.add_argument("--out", help="output directory (overrides config output_dir)")
    sp.add_argument("--seed", type=int, help="override base_seed")
    sp.add_argument("--shots", type=int, help="override shots_per_setting")
    sp.add_argument("--variant", choices=("both-qubits", "signal-only", "no-noise"))
    sp.add_argument("--no-mitigation", action="store_true")
    sp.add_argument("--transpile", action="store_true")
    sp.add_argument("--map", help="'jakarta' or a coupling-map JSON file")
    sp.set_defaults(fn=_cmd_sweep)

    tp = sub.add_parser("tomo", help="reconstruct a density matrix from a counts file")
    tp.add_argument("--counts", required=True, help='JSON {"settings": {"XYZ": {bits: count}}}')
    tp.add_argument("--out")
    tp.set_defaults(fn=_cmd_tomo)

    rp = sub.add_parser("transpile", help="lower a circuit JSON and report routing metrics")
    rp.add_argument("--in", dest="infile", required=True)
    rp.add_argument("--map", default="jakarta")
    rp.add_argument("--layout", help="comma-separated logical->physical layout")
    rp.add_argument("--out")
    rp.set_defaults(fn=_cmd_transpile)

    cp = sub.add_parser("calibrate", help="emit a readout calibration matrix")
    cp.add_argument("--qubits", type=int, required=True)
    cp.add_argument("--p01", type=float, default=0.0, help="P(read 1 | true 0)")
    cp.add_argument("--p10", type=float, default=0.0, help="P(read 0 | true 1)")
    cp.add_argument("--shots", type=int, help="measured mode; omit for the analytic matrix")
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--out")
    cp.set_defaults(fn=_cmd_calibrate)

    dp = sub.add_parser("dump-ideal", help="write the ideal routed state's density matrix")
    dp.add_argument("--out")
    dp.set_defaults(fn=_cmd_dump_ideal)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (QRouterError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

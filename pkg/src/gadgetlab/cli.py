"""Command-line pipelines over the generators, gadget builders, and oracles.

All artifacts are JSON written atomically (temp file + rename). Exit codes:
0 success, 2 certificate failure, 1 usage or config error. Every stochastic
stage derives its stream from --seed and a stage name via seeding.derive_seed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import boolfn, dto1, games, hadamard, longcode, ternary, verify
from .seeding import derive_rng, derive_seed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CERT = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1, not argparse's default 2
        raise UsageError(message)


def write_artifact(path: str | Path, payload: dict) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_artifact(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from exc


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _config_dict(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func" and v is not None}


def cmd_gen_3lin(args) -> int:
    inst, witness = games.gen_3lin(args.n, args.eqs, derive_rng(args.seed, "gen-3lin"),
                                   planted=not args.random)
    payload = {"config": _config_dict(args), "instance": inst.to_json_dict()}
    if witness is not None:
        payload["planted_assignment"] = list(witness)
    write_artifact(args.out, payload)
    print(f"wrote {args.out}: {inst.n} variables, {len(inst.equations)} equations")
    return EXIT_OK


def cmd_gen_game(args) -> int:
    game = games.gen_toy_dto1_game(args.u, args.v, args.k, args.d,
                                   derive_rng(args.seed, "gen-game"),
                                   planted=not args.random, degree=args.degree)
    write_artifact(args.out, {"config": _config_dict(args), "game": game.to_json_dict()})
    print(f"wrote {args.out}: {args.v}x{args.u} game, labels {game.m}->{game.k}, d={game.d}")
    return EXIT_OK


def cmd_build_mlpcp(args) -> int:
    if args.game:
        payload = read_artifact(args.game)
        game = games.Dto1Game.from_json_dict(payload.get("game", payload))
        pcp = games.build_smooth_mlpcp(game, args.layers, args.smooth_t)
        smooth = games.check_smoothness(pcp)
        payload = {"config": _config_dict(args), "pcp": pcp.to_json_dict(),
                   "smoothness": {"max_collision": smooth["max_collision"],
                                  "bound": smooth["bound"], "ok": smooth["ok"]}}
        write_artifact(args.out, payload)
        print(f"wrote {args.out}: smooth {pcp.layers}-layer PCP, "
              f"label sizes {list(pcp.label_sizes)}, "
              f"smoothness {smooth['max_collision']:.4f} <= {smooth['bound']:.4f}: {smooth['ok']}")
        return EXIT_OK if smooth["ok"] else EXIT_CERT
    sizes = [int(x) for x in args.label_sizes.split(",")]
    pcp = games.gen_toy_mlpcp(args.layers, args.vars_per_layer, sizes,
                              derive_rng(args.seed, "build-mlpcp"),
                              density=args.density, planted=not args.random)
    write_artifact(args.out, {"config": _config_dict(args), "pcp": pcp.to_json_dict()})
    print(f"wrote {args.out}: plain {pcp.layers}-layer PCP, label sizes {list(pcp.label_sizes)}")
    return EXIT_OK


def cmd_build_hadamard(args) -> int:
    bundle = read_artifact(args.instance)
    inst = games.Lin3Instance.from_json_dict(bundle.get("instance", bundle))
    gadget = hadamard.build(inst, args.r, mode=args.mode, triples=args.triples,
                            seed=derive_seed(args.seed, "build-hadamard"),
                            distinct_blocks=args.distinct_blocks)
    payload = {
        "config": _config_dict(args),
        "instance": inst.to_json_dict(),
        "hypergraph": gadget.to_hypergraph().to_json_dict(),
    }
    if "planted_assignment" in bundle:
        payload["planted_assignment"] = bundle["planted_assignment"]
    write_artifact(args.out, payload)
    if args.edge_list:
        Path(args.edge_list).write_text(gadget.to_hypergraph().to_edge_list())
    h = gadget.to_hypergraph()
    print(f"wrote {args.out}: {len(h.vertices)} vertices, {len(h.edges)} edges, "
          f"{gadget.dropped_degenerate} degenerate raw edges dropped")
    return EXIT_OK


def _load_pcp(path: str) -> games.LayeredPcp:
    payload = read_artifact(path)
    return games.LayeredPcp.from_json_dict(payload.get("pcp", payload))


def cmd_build_longcode(args) -> int:
    pcp = _load_pcp(args.pcp)
    gadget = longcode.build(pcp, Fraction(args.epsilon))
    payload = {"config": _config_dict(args), "pcp": pcp.to_json_dict(),
               "mode": gadget.mode}
    if gadget.mode == "enumerate":
        payload["hypergraph"] = gadget.to_hypergraph().to_json_dict()
    write_artifact(args.out, payload)
    print(f"wrote {args.out}: mode={gadget.mode}, {gadget.vertex_count} vertices")
    return EXIT_OK


def cmd_build_dto1(args) -> int:
    pcp = _load_pcp(args.pcp)
    gadget = dto1.build(pcp, args.delta)
    payload = {"config": _config_dict(args), "pcp": pcp.to_json_dict(),
               "mode": gadget.mode, "delta": args.delta}
    if gadget.mode == "enumerate":
        payload["hypergraph"] = gadget.to_hypergraph().to_json_dict()
    write_artifact(args.out, payload)
    print(f"wrote {args.out}: mode={gadget.mode}, {gadget.vertex_count} vertices")
    return EXIT_OK


def cmd_verify(args) -> int:
    bundle = read_artifact(args.input)
    if args.mode == "yes":
        cfg = bundle["config"]
        inst = games.Lin3Instance.from_json_dict(bundle["instance"])
        gadget = hadamard.build(inst, cfg["r"], mode=cfg.get("mode", "enumerate"),
                                triples=cfg["triples"],
                                seed=derive_seed(cfg["seed"], "build-hadamard"),
                                distinct_blocks=cfg.get("distinct_blocks", False))
        sigma = bundle.get("planted_assignment")
        if sigma is None:
            raise UsageError("verify --mode yes needs a bundle with a planted assignment")
        result = hadamard.yes_coloring(gadget, sigma)
        report = {"removed": len(result.removed), "violations": len(result.violations),
                  "surviving_edges": result.surviving_edges, "ok": result.ok}
        if args.out:
            write_artifact(args.out, {"config": _config_dict(args), "yes_certificate": report})
        print(f"yes-case certificate: removed={report['removed']} "
              f"violations={report['violations']} ok={report['ok']}")
        return EXIT_OK if result.ok and not result.removed else EXIT_CERT
    h = verify.GenericHypergraph.from_json_dict(bundle["hypergraph"])
    if args.mode == "max-is":
        res = verify.max_independent_set(h, budget=args.budget)
        report = {"weight": [res.weight.numerator, res.weight.denominator],
                  "size": len(res.vertices), "optimal": res.optimal,
                  "vertices": sorted(res.vertices)}
        if args.out:
            write_artifact(args.out, {"config": _config_dict(args), "max_is": report})
        print(f"max independent set: weight {res.weight} ({len(res.vertices)} vertices), "
              f"optimal={res.optimal}")
        return EXIT_OK
    if args.mode == "two-color":
        res = verify.two_colorable(h)
        if args.out:
            write_artifact(args.out, {"config": _config_dict(args),
                                      "two_colorable": res.colorable})
        print(f"two-colorable: {res.colorable}")
        return EXIT_OK if res.colorable else EXIT_CERT
    if args.mode == "almost":
        res = verify.almost_two_colorable(h, Fraction(args.epsilon))
        if args.out:
            write_artifact(args.out, {"config": _config_dict(args), "success": res.success,
                                      "removed": sorted(res.removal) if res.removal else None})
        print(f"almost-two-colorable at eps={args.epsilon}: {res.success}")
        return EXIT_OK if res.success else EXIT_CERT
    raise UsageError(f"unknown verify mode {args.mode}")


def cmd_analyze(args) -> int:
    report: dict = {"config": _config_dict(args)}
    if args.correlations:
        report["correlations"] = dto1.correlation_suite(args.delta, args.r)
        dist = dto1.dist_table(args.delta, args.r)
        report["min_atom"] = report["correlations"]["min_atom"]
        if args.csv:
            Path(args.csv).write_text(dist.to_csv())
    if args.spectra:
        table = read_artifact(args.spectra)
        values = np.array(table["values"], dtype=np.float64)
        m = int(round(np.log2(values.size)))
        from . import gf2
        spec = gf2.fourier_transform(gf2.RealTable(m, values))
        report["spectrum_csv"] = gf2.spectrum_to_csv(spec)
    if args.family:
        fam = ternary.TernaryFamily.deserialize(Path(args.family).read_text().strip())
        inf = ternary.influences(fam)
        report["influences"] = [float(x) for x in inf]
        report["average_sensitivity"] = float(inf.sum())
        report["measure"] = ternary.measure(fam)
    if args.gamma is not None:
        lo, hi = boolfn.gamma_bounds(args.gamma, args.mu, args.nu)
        report["gamma_lower"] = lo
        report["gamma_upper"] = hi
    if args.out:
        write_artifact(args.out, report)
        print(f"wrote {args.out}")
    else:
        print(json.dumps({k: v for k, v in report.items() if k != "config"},
                         indent=2, sort_keys=True, default=str))
    return EXIT_OK


def cmd_decode(args) -> int:
    bundle = read_artifact(args.gadget)
    pcp = games.LayeredPcp.from_json_dict(bundle["pcp"])
    indicator_data = read_artifact(args.indicator)
    if args.kind == "longcode":
        gadget = longcode.build(pcp, Fraction(bundle["config"]["epsilon"]))
        vertex_ids = set(indicator_data["vertices"])
        outcome = longcode.decode(gadget, vertex_ids, args.delta,
                                  seed=derive_seed(args.seed, "decode"))
        report = {
            "layer_pair": list(outcome.layer_pair),
            "satisfied_fraction": str(outcome.satisfied_fraction),
            "satisfied_fraction_all": str(outcome.satisfied_fraction_all),
            "labels_v": {f"{k[0]},{k[1]}": v for k, v in outcome.rho.items()},
            "labels_u": {f"{k[0]},{k[1]}": v for k, v in outcome.lam.items()},
        }
    else:
        params = dto1.DecodeParams(args.delta, args.eps, args.nu, args.gamma,
                                   args.tau, args.s, args.smooth_t)
        indicators = {
            (int(key.split(",")[0]), int(key.split(",")[1])): np.array(vals, dtype=np.float64)
            for key, vals in indicator_data["indicators"].items()
        }
        outcome = dto1.decode(indicators, pcp, params, seed=derive_seed(args.seed, "decode"))
        report = {
            "outcome": outcome.outcome,
            "layer_pair": list(outcome.layer_pair) if outcome.layer_pair else None,
            "satisfied_fraction": str(outcome.satisfied_fraction),
            "satisfied_fraction_all": str(outcome.satisfied_fraction_all),
        }
    if args.out:
        write_artifact(args.out, {"config": _config_dict(args), "decode": report})
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_report(args) -> int:
    checks = []
    inputs = []
    for path in args.inputs:
        payload = read_artifact(path)
        inputs.append({"path": str(path), "sha256": file_sha256(path)})
        for key, value in payload.items():
            if isinstance(value, dict) and "ok" in value:
                checks.append({"source": str(path), "check": key, "ok": bool(value["ok"])})
            elif key.endswith("_ok") or key == "ok":
                checks.append({"source": str(path), "check": key, "ok": bool(value)})
            elif key == "correlations":
                for ck, cv in value.items():
                    if ck.endswith("_ok"):
                        checks.append({"source": str(path), "check": ck, "ok": bool(cv)})
    summary = {
        "config": _config_dict(args),
        "inputs": inputs,
        "checks": checks,
        "all_ok": all(c["ok"] for c in checks) if checks else True,
    }
    write_artifact(args.out, summary)
    print(f"wrote {args.out}: {sum(c['ok'] for c in checks)}/{len(checks)} checks pass")
    return EXIT_OK if summary["all_ok"] else EXIT_CERT


def build_parser() -> _Parser:
    parser = _Parser(prog="gadgetlab",
                     description="hardness-reduction gadget constructors and exact checkers")
    parser.add_argument("--out-dir", default=os.environ.get("GADGETLAB_OUT", "."),
                        help="default directory for artifacts (env GADGETLAB_OUT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-3lin", help="toy Max-3Lin instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eqs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random", action="store_true", help="random right-hand sides (no witness)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_3lin)

    p = sub.add_parser("gen-game", help="toy bi-regular d-to-1 game")
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--degree", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--random", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_game)

    p = sub.add_parser("build-mlpcp", help="layered PCP: smooth (from a game) or toy plain")
    p.add_argument("--game", help="game artifact for the smooth build")
    p.add_argument("--layers", type=int, required=True)
    p.add_argument("--smooth-t", type=int, default=1)
    p.add_argument("--vars-per-layer", type=int, default=2)
    p.add_argument("--label-sizes", default="3,3", help="comma list, plain build only")
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--random", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_mlpcp)

    p = sub.add_parser("build-hadamard", help="4-uniform folded-code gadget")
    p.add_argument("--instance", required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--triples", type=int, default=2)
    p.add_argument("--mode", choices=("enumerate", "stream"), default="enumerate")
    p.add_argument("--distinct-blocks", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-list", help="also write a flat edge list")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_hadamard)

    p = sub.add_parser("build-longcode", help="3-uniform biased long-code gadget")
    p.add_argument("--pcp", required=True)
    p.add_argument("--epsilon", required=True, help="rational, e.g. 1/10")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_longcode)

    p = sub.add_parser("build-dto1", help="3-uniform correlated-test gadget")
    p.add_argument("--pcp", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_dto1)

    p = sub.add_parser("verify", help="oracles over an artifact")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("yes", "max-is", "two-color", "almost"), required=True)
    p.add_argument("--epsilon", default="0")
    p.add_argument("--budget", type=int, default=verify.DEFAULT_NODE_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="spectra / influences / correlations / quadrant bounds")
    p.add_argument("--correlations", action="store_true")
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--csv", help="write the distribution table as CSV")
    p.add_argument("--spectra", help="JSON file with a 'values' table")
    p.add_argument("--family", help="serialized ternary family file")
    p.add_argument("--gamma", type=float, help="correlation for quadrant probabilities")
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decode", help="no-case decoding pipelines")
    p.add_argument("--kind", choices=("longcode", "dto1"), required=True)
    p.add_argument("--gadget", required=True)
    p.add_argument("--indicator", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--tau", type=float, default=1e-4)
    p.add_argument("--s", type=float, default=3.0)
    p.add_argument("--smooth-t", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("report", help="merge JSON diagnostics into one summary")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for attr in ("out", "edge_list", "csv"):
            value = getattr(args, attr, None)
            if value is not None and not Path(value).is_absolute():
                setattr(args, attr, str(Path(args.out_dir) / value))
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

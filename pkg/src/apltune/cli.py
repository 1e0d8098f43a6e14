"""Command-line front end.

Every command that writes data also writes a JSON manifest holding the fully
resolved parameters (seed included); ``apltune replay MANIFEST`` re-runs it and
checks that each output is byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .generators import WsConfig, ring_lattice, watts_strogatz
from .graph import GraphError, clustering_stats, path_stats, read_edgelist, write_edgelist
from .harness import SpecError, SweepSpec, bifurcation_sweep, records_to_csv
from .majority import MajorityConfig, simulate
from .seeding import fresh_seed
from .tuner import AnnealConfig, tune_apl

log = logging.getLogger("apltune")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(text.encode("ascii"))


def _load_graph(path):
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    try:
        return read_edgelist(path)
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from exc


# -- commands ---------------------------------------------------------------
# Each returns (outputs, inputs) as lists of paths.


def cmd_generate(a):
    if a.model == "ring":
        g = ring_lattice(a.n, a.k)
    else:
        if a.p is None:
            raise UsageError("--p is required for --model ws")
        g = watts_strogatz(WsConfig(a.n, a.k, a.p, a.seed))
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    write_edgelist(g, a.out)
    return [a.out], []


def cmd_measure(a):
    g = _load_graph(a.input)
    ps = path_stats(g)
    cs = clustering_stats(g)
    deg = g.degrees
    print(f"{g.n_nodes} {g.n_edges} {ps.apl!r} {cs.global_coefficient!r} {int(deg.min())} {int(deg.max())}")
    if a.dist:
        rows = ["d,P"] + [f"{d},{p!r}" for d, p in sorted(ps.histogram.items())]
        _write(a.dist, "\n".join(rows) + "\n")
        return [a.dist], [a.input]
    return [], [a.input]


def cmd_tune(a):
    g = _load_graph(a.input)
    cfg = AnnealConfig(
        target_apl=a.target_apl,
        temp0=a.temp0,
        cool_factor=a.cool_factor,
        cool_interval=a.cool_interval,
        tolerance=a.tol,
        max_proposals=a.max_proposals,
        plateau_window=a.plateau_window,
        seed=a.seed,
        apl_mode=a.apl_mode,
    )
    tuned, trace = tune_apl(g, cfg)
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    write_edgelist(tuned, a.out)
    outputs = [a.out]
    if a.trace:
        _write(a.trace, trace.to_csv())
        outputs.append(a.trace)
    log.info("stopped: %s after %d proposals (%d accepted)", trace.stop_reason, len(trace), trace.n_accepted)
    return outputs, [a.input]


def cmd_simulate(a):
    g = _load_graph(a.input)
    cfg = MajorityConfig(
        epsilon=a.epsilon, steps=a.steps, scheme=a.scheme, d0=a.d0, seed=a.seed, snapshot_every=a.snapshot_every
    )
    trace = simulate(g, cfg)
    _write(a.out, trace.to_csv())
    outputs = [a.out]
    if a.snapshots:
        if not a.snapshot_every:
            raise UsageError("--snapshots needs --snapshot-every")
        _write(a.snapshots, trace.snapshots_text())
        outputs.append(a.snapshots)
    return outputs, [a.input]


def cmd_sweep(a):
    if not Path(a.config).is_file():
        raise UsageError(f"no such file: {a.config}")
    try:
        doc = json.loads(Path(a.config).read_text())
        if a.seed_given:
            doc["master_seed"] = a.seed
        spec = SweepSpec.from_dict(doc)
    except (SpecError, json.JSONDecodeError) as exc:
        raise UsageError(str(exc)) from exc
    a.seed = spec.master_seed
    records, summary = bifurcation_sweep(spec, jobs=a.jobs)
    out = Path(a.out_dir)
    paths = [out / "records.csv", out / "summary.csv", out / "report.txt"]
    _write(paths[0], records_to_csv(records))
    _write(paths[1], summary.to_csv())
    _write(paths[2], summary.report())
    return [str(p) for p in paths], [a.config]


COMMANDS = {
    "generate": cmd_generate,
    "measure": cmd_measure,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}

# commands whose output depends on --seed (sweep defaults to the spec's master_seed)
_RANDOMIZED = {"generate", "tune", "simulate"}

# parameters that do not affect data outputs and are not recorded
_UNRECORDED = {"command", "seed_given", "verbose", "jobs"}


def _apl_mode(text):
    from .tuner import parse_apl_mode

    try:
        parse_apl_mode(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apltune", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"apltune {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--seed", type=int, default=None)
        return p

    p = add("generate", "write a ring lattice or Watts-Strogatz graph")
    p.add_argument("--model", choices=["ws", "ring"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="half-degree (degree is 2k)")
    p.add_argument("--p", type=float)
    p.add_argument("--out", required=True)

    p = add("measure", "print 'N M L C min_deg max_deg' for an edge list")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--dist", help="write the distance distribution P(d) as CSV")

    p = add("tune", "anneal a graph towards a target average path length")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--target-apl", type=float, required=True)
    p.add_argument("--temp0", type=float, default=10.0)
    p.add_argument("--cool-factor", type=float, default=0.9)
    p.add_argument("--cool-interval", type=int, default=200)
    p.add_argument("--tol", type=float, default=0.005)
    p.add_argument("--max-proposals", type=int, default=1_000_000)
    p.add_argument("--plateau-window", type=int, default=5_000)
    p.add_argument("--apl-mode", type=_apl_mode, default="exact")
    p.add_argument("--out", required=True)
    p.add_argument("--trace")

    p = add("simulate", "run majority-rule dynamics and write d(t)")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--d0", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--scheme", choices=["sync", "async"], default="sync")
    p.add_argument("--out", required=True)
    p.add_argument("--snapshots")
    p.add_argument("--snapshot-every", type=int, default=0)

    p = add("sweep", "bifurcation sweep from a JSON spec")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("replay", help="re-run a manifest and verify its outputs")
    p.add_argument("manifest")
    p.add_argument("--into", help="write outputs into this directory instead")
    return parser


def _manifest_path(command, outputs):
    if command == "sweep":
        return Path(outputs[0]).parent / "manifest.json"
    return Path(str(outputs[0]) + ".manifest.json")


def _write_manifest(args, outputs, inputs):
    params = {k: v for k, v in vars(args).items() if k not in _UNRECORDED}
    manifest = {
        "command": args.command,
        "params": params,
        "seed": args.seed,
        "version": __version__,
        "inputs": {str(p): _digest(p) for p in inputs},
        "outputs": {str(p): _digest(p) for p in outputs},
    }
    path = _manifest_path(args.command, outputs)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


_OUTPUT_KEYS = ("out", "trace", "dist", "snapshots", "out_dir")


def replay(manifest_path, into=None) -> bool:
    manifest = json.loads(Path(manifest_path).read_text())
    params = dict(manifest["params"])
    remap = {}
    if into is not None:
        into = Path(into)
        for key in _OUTPUT_KEYS:
            if params.get(key):
                new = str(into / Path(params[key]).name)
                remap[params[key]] = new
                params[key] = new
    args = argparse.Namespace(command=manifest["command"], seed_given=True, verbose=False, jobs=1, **params)
    outputs, inputs = COMMANDS[args.command](args)
    _write_manifest(args, outputs, inputs)
    ok = True
    for old, digest in manifest["outputs"].items():
        new = old
        if into is not None:
            if manifest["command"] == "sweep":
                new = str(Path(params["out_dir"]) / Path(old).name)
            else:
                new = remap.get(old, str(into / Path(old).name))
        if _digest(new) != digest:
            print(f"apltune: replay mismatch for {new}", file=sys.stderr)
            ok = False
    return ok


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")

    if args.command == "replay":
        try:
            return EXIT_OK if replay(args.manifest, args.into) else EXIT_FAILURE
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            print(f"apltune: cannot replay {args.manifest}: {exc}", file=sys.stderr)
            return EXIT_USAGE

    args.seed_given = args.seed is not None
    if args.seed is None and args.command in _RANDOMIZED:
        args.seed = fresh_seed()
        print(f"apltune: using seed {args.seed}", file=sys.stderr)
    try:
        outputs, inputs = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"apltune: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, ValueError, OSError) as exc:
        print(f"apltune: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if outputs:
        _write_manifest(args, outputs, inputs)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

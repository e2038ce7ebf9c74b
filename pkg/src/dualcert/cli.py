"""Command-line front end.

Every command reads a JSON config (``--config``) and writes CSV or JSON to
``--out`` (stdout by default). CSV files start with ``#`` metadata lines
carrying the resolved config and its SHA-256, and all numbers use 12
significant digits so identical configs give byte-identical output.

Exit codes: 0 on success, 2 on usage or config errors, 3 on numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys

import numpy as np

from . import __version__
from .certification import ProbabilityBounds, certify, radius_sweep
from .distributions import DiscretizationSpec
from .duality import default_epsilon_grid, dual_to_primal
from .exceptions import (
    DualCertError,
    ExtrapolationError,
    MonotonicityError,
    NumericFailure,
)
from .mechanisms import (
    DatasetChanges,
    GaussianMechanism,
    Joint,
    L2Ball,
    SubsampledGaussian,
    decompose_relation,
    mechanism_pld,
    mechanism_profile,
    mechanism_to_dict,
    parse_mechanism,
    parse_relation,
    relation_to_dict,
)
from .rdp import DEFAULT_ORDERS, rdp_compose, rdp_curve, rdp_privacy_profile

COMMANDS = ("profile", "tradeoff", "compose", "certify", "radius-sweep", "compare-rdp")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

_GRID_DEFAULTS = {"bucket_width": 1e-4, "eps_range": [-20.0, 20.0], "eps_points": 4001}
_NUMERIC_ERRORS = (NumericFailure, MonotonicityError, ExtrapolationError)


class ConfigError(Exception):
    """Invalid configuration; reported with exit code 2."""


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def _parse_range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    return [lo, hi]


def load_config(path):
    """Read a JSON config, reporting parse errors with line and column."""
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def resolve_grid(config, args):
    """Merge grid settings from the config file and command-line flags.

    The config file wins when both set a value; with ``--strict`` a
    disagreement is an error instead.
    """
    grid = dict(_GRID_DEFAULTS)
    from_file = config.get("grid", {})
    if not isinstance(from_file, dict):
        raise ConfigError("'grid' must be an object")
    flags = {"bucket_width": args.bucket_width, "eps_range": args.eps_range,
             "eps_points": args.eps_points}
    for key, flag in flags.items():
        if flag is not None:
            grid[key] = flag
        if key in from_file:
            if args.strict and flag is not None and from_file[key] != flag:
                raise ConfigError(f"--{key.replace('_', '-')} conflicts with the config value "
                                  f"{from_file[key]!r} (--strict)")
            grid[key] = from_file[key]
    unknown = set(from_file) - set(_GRID_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    lo, hi = (float(v) for v in grid["eps_range"])
    if not lo < hi:
        raise ConfigError("eps_range must satisfy lo < hi")
    if not float(grid["bucket_width"]) > 0.0:
        raise ConfigError("bucket_width must be positive")
    if int(grid["eps_points"]) != grid["eps_points"] or grid["eps_points"] < 3:
        raise ConfigError("eps_points must be an integer >= 3")
    return {"bucket_width": float(grid["bucket_width"]), "eps_range": [lo, hi],
            "eps_points": int(grid["eps_points"])}


def _threat_from(obj, train_radius=None, test_radius=None):
    """Relation from either relation JSON or ``{"train_radius", "test_radius"}``."""
    if not isinstance(obj, dict):
        raise ConfigError("'threat' must be an object")
    if "type" in obj:
        if train_radius is not None or test_radius is not None:
            raise ConfigError("radius sweeps need a threat given by train_radius/test_radius")
        return parse_relation(obj)
    R = obj.get("train_radius", 0) if train_radius is None else train_radius
    d = obj.get("test_radius", 0.0) if test_radius is None else test_radius
    if R and d:
        return Joint(DatasetChanges(R), L2Ball(d))
    if d:
        return L2Ball(d)
    return DatasetChanges(R)


def _bounds_from(config):
    if "bounds" in config:
        b = config["bounds"]
        if "p2_upper" not in b:
            return ProbabilityBounds.binary(b["p1_lower"])
        return ProbabilityBounds(b["p1_lower"], b["p2_upper"])
    if "counts" in config:
        counts = config["counts"]
        return ProbabilityBounds.from_counts(
            counts, config.get("total", sum(counts)), config.get("confidence", 0.999),
            predicted=config.get("predicted"), mode=config.get("bounds_mode", "bonferroni"))
    raise ConfigError("config needs 'bounds' or 'counts'")


class Run:
    """One resolved command invocation."""

    def __init__(self, command, config, grid, threads):
        self.command = command
        self.config = config
        self.grid = grid
        self.threads = threads
        if "mechanism" not in config:
            raise ConfigError("config needs a 'mechanism'")
        self.mechanism = parse_mechanism(config["mechanism"])
        self.disc = DiscretizationSpec(bucket_width=grid["bucket_width"])
        lo, hi = grid["eps_range"]
        self.dual_grid = default_epsilon_grid(grid["eps_points"], span=max(abs(lo), abs(hi)))

    def resolved(self):
        out = {k: v for k, v in self.config.items() if k != "grid"}
        out["command"] = self.command
        out["mechanism"] = mechanism_to_dict(self.mechanism)
        out["grid"] = self.grid
        if self.command == "compare-rdp":
            out["rdp_orders"] = {"count": len(DEFAULT_ORDERS), "min": DEFAULT_ORDERS[0],
                                 "max": DEFAULT_ORDERS[-1], "spacing": "1 + geomspace"}
            out.setdefault("rdp_conversion", "classic")
        return out

    def config_hash(self):
        text = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def profiles(self, rel):
        return mechanism_profile(self.mechanism, rel, grid=self.dual_grid,
                                 discretization=self.disc, threads=self.threads)

    def threat(self, **kw):
        if "threat" not in self.config:
            raise ConfigError("config needs a 'threat'")
        return _threat_from(self.config["threat"], **kw)

    # Commands return (kind, payload): ("csv", (columns, rows, extra_meta)) or ("json", dict).

    def do_profile(self):
        rel = self.threat()
        lo, hi = self.grid["eps_range"]
        eps = np.linspace(lo, hi, self.grid["eps_points"])
        rows = []
        for i, prof in enumerate(self.profiles(rel)):
            rows.extend((i, e, d) for e, d in zip(eps, prof(eps)))
        return "csv", (["relation", "epsilon", "delta"], rows, {})

    def do_tradeoff(self):
        rel = self.threat()
        alphas = np.asarray(self.config.get("alphas", np.linspace(0.0, 1.0, 101)), dtype=float)
        rows = []
        for i, prof in enumerate(self.profiles(rel)):
            f = dual_to_primal(prof, alphas, grid=self.dual_grid)
            rows.extend((i, a, v) for a, v in zip(alphas, f))
        return "csv", (["relation", "alpha", "f"], rows, {})

    def do_compose(self):
        rel = self.threat()
        out = []
        for leaf in decompose_relation(rel):
            pld = mechanism_pld(self.mechanism, leaf, self.disc)
            out.append({"relation": relation_to_dict(leaf), "pld": json.loads(pld.to_json())})
        return "json", {"relations": out}

    def do_certify(self):
        rel = self.threat()
        bounds = _bounds_from(self.config)
        res = certify(bounds, self.profiles(rel), grid=self.dual_grid, threads=self.threads)
        out = res.to_dict()
        out["p1_lower"] = bounds.p1_lower
        out["p2_upper"] = bounds.p2_upper
        return "json", out

    def _sweep_axis(self):
        axis = self.config.get("sweep_axis")
        if axis is None:
            axis = "test" if isinstance(self.mechanism, GaussianMechanism) else "train"
        if axis not in ("train", "test"):
            raise ConfigError("sweep_axis must be 'train' or 'test'")
        return axis

    def _radii(self):
        radii = self.config.get("radii")
        if not isinstance(radii, list) or not radii:
            raise ConfigError("'radii' must be a non-empty list")
        return radii

    def _row(self, axis, r, res, method=None):
        threat = self.config.get("threat", {})
        train = r if axis == "train" else threat.get("train_radius", 0)
        test = r if axis == "test" else threat.get("test_radius", 0.0)
        row = (train, test, res.margin, res.robust, res.binding_relation)
        return row if method is None else (method,) + row

    def do_radius_sweep(self):
        axis = self._sweep_axis()
        radii = self._radii()
        bounds = _bounds_from(self.config)

        def family(r):
            kw = {"train_radius": r} if axis == "train" else {"test_radius": r}
            return self.profiles(self.threat(**kw))

        sweep = radius_sweep(bounds, family, radii, scan=self.config.get("scan", "linear"),
                             early_exit=bool(self.config.get("early_exit", False)),
                             grid=self.dual_grid)
        rows = [self._row(axis, r, res) for r, res in zip(sweep.radii, sweep.results)
                if res is not None]
        return "csv", (["radius", "test_radius", "margin", "robust", "binding_relation"], rows,
                       {"certified_radius": "none" if sweep.radius is None else _fmt(sweep.radius)})

    def do_compare_rdp(self):
        if not isinstance(self.mechanism, SubsampledGaussian):
            raise ConfigError("compare-rdp supports the subsampled_gaussian mechanism only")
        radii = self._radii()
        if any(int(r) != r or r < 0 for r in radii):
            raise ConfigError("compare-rdp radii must be non-negative integers")
        bounds = _bounds_from(self.config)
        conversion = self.config.get("rdp_conversion", "classic")
        spec = self.mechanism
        rows = []
        summary = {}
        for method in ("profile", "rdp"):
            def family(r, method=method):
                r = int(r)
                if method == "profile":
                    return self.profiles(DatasetChanges(r))
                if r == 0:
                    return mechanism_profile(spec, DatasetChanges(0))
                curve = rdp_compose(rdp_curve(spec.gamma, spec.sigma, r), spec.iterations)
                return [rdp_privacy_profile(curve, conversion)]

            sweep = radius_sweep(bounds, family, radii, early_exit=True, grid=self.dual_grid)
            rows.extend(self._row("train", r, res, method)
                        for r, res in zip(sweep.radii, sweep.results) if res is not None)
            summary[f"certified_radius_{method}"] = (
                "none" if sweep.radius is None else _fmt(sweep.radius))
        return "csv", (["method", "radius", "test_radius", "margin", "robust",
                        "binding_relation"], rows, summary)

    def execute(self):
        handler = getattr(self, "do_" + self.command.replace("-", "_"))
        return handler()


def render(run, kind, payload):
    meta = {"tool": f"dualcert {__version__}", "command": run.command,
            "config_sha256": run.config_hash()}
    if kind == "json":
        out = dict(payload)
        out["_meta"] = dict(meta, config=run.resolved())
        return json.dumps(out, indent=2, sort_keys=True) + "\n"
    columns, rows, extra = payload
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(f"# config: {json.dumps(run.resolved(), sort_keys=True)}\n")
    for key, value in extra.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config file ('-' for stdin)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--bucket-width", type=float, help="PLD bucket width")
    common.add_argument("--eps-range", type=_parse_range, help="epsilon range lo:hi")
    common.add_argument("--eps-points", type=int, help="number of epsilon points")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--strict", action="store_true",
                        help="fail when a flag and the config disagree")
    parser = argparse.ArgumentParser(prog="dualcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        run = Run(args.command, config, resolve_grid(config, args), args.threads)
        text = render(run, *run.execute())
    except ConfigError as exc:
        print(f"dualcert: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"dualcert: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DualCertError, KeyError, TypeError, ValueError) as exc:
        print(f"dualcert: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Examples::

    malab entire --n 2 --p 1 --a0 1 --r-max 100
    malab large --n 2 --p 3 --R 0.5 1 2 4 --plot
    malab barrier --p 0.25 --beta -1
    malab verify --n 3 --p 1
    malab sweep barrier --p 0.125 0.25 --beta -1 -2 --workers 4
    malab accept

Every command writes ``<stem>.csv`` (plus extra tables as
``<stem>_<name>.csv``), ``<stem>.json`` and, with ``--plot``, ``<stem>.svg``
into ``--out``. Wall-clock times go to ``<stem>.wallclock.json`` so the main
outputs are byte-reproducible. Exit status: 0 pass, 1 failed check,
2 usage error.
"""

import argparse
import configparser
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import InputError, MalabError
from .report import clean

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SWEEPABLE = ("entire", "large", "barrier", "verify")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sp):
    sp.add_argument("--config", help="flat key = value file; command-line flags win")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--stem", help="output file stem (default: command name)")
    sp.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv",
                    help="format of the summary printed to stdout")
    sp.add_argument("--plot", action="store_true", help="also write an SVG plot")


def _spec_args(sp, p_required=True):
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--p", type=float, required=p_required)
    sp.add_argument("--A", type=float, default=1.0)


def build_parser():
    ap = _Parser(prog="malab", description="Radial and separable Monge-Ampere experiments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("entire", help="entire radial solution for p < n")
    _spec_args(sp)
    sp.add_argument("--a0", type=float, default=1.0)
    sp.add_argument("--r-max", type=float, default=100.0)
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--delta", type=float, default=0.05)
    _common(sp)

    sp = sub.add_parser("large", help="large solutions on balls (p > n) or the p = n demo")
    _spec_args(sp)
    sp.add_argument("--R", type=float, nargs="+", default=[1.0], help="ball radii")
    _common(sp)

    sp = sub.add_parser("barrier", help="zero-boundary barrier for n = 2")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--phi-max", type=float, default=1e4)
    sp.add_argument("--q", type=float, default=0.9)
    sp.add_argument("--delta", type=float, default=1e-3)
    sp.add_argument("--r1", type=float, default=1.0)
    sp.add_argument("--phi1", type=float)
    _common(sp)

    sp = sub.add_parser("verify", help="oracle checks for one (n, p)")
    _spec_args(sp)
    sp.add_argument("--r0", type=float, default=0.1)
    sp.add_argument("--r1", type=float, default=10.0)
    _common(sp)

    sp = sub.add_parser("sweep", help="run one command over a parameter grid in parallel")
    sp.add_argument("target", choices=SWEEPABLE)
    sp.add_argument("--n", type=int, nargs="+", default=[2])
    sp.add_argument("--p", type=float, nargs="+", required=True)
    sp.add_argument("--a0", type=float, nargs="+", default=[1.0])
    sp.add_argument("--beta", type=float, nargs="+", default=[-1.0])
    sp.add_argument("--R", type=float, nargs="+", default=[1.0])
    sp.add_argument("--r-max", type=float, default=100.0)
    sp.add_argument("--workers", type=int, default=1)
    _common(sp)

    sp = sub.add_parser("accept", help="run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    _common(sp)
    return ap


def _load_config(path, subparser):
    text = Path(path).read_text()
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"unreadable config {path}: {exc}") from None
    actions = {a.dest: a for a in subparser._actions if a.dest not in ("help", "config")}
    values = {}
    for key, raw in cp["run"].items():
        dest = key.replace("-", "_")
        if dest not in actions:
            raise UsageError(f"unknown config key {key!r}")
        act = actions[dest]
        conv = act.type or str
        try:
            if act.nargs == "+":
                values[dest] = [conv(v) for v in raw.replace(",", " ").split()]
            elif isinstance(act, argparse._StoreTrueAction):
                values[dest] = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                values[dest] = conv(raw.strip())
        except ValueError:
            raise UsageError(f"bad value for {key!r}: {raw!r}") from None
        if act.choices is not None and values[dest] not in act.choices:
            raise UsageError(f"{key!r} must be one of {list(act.choices)}")
    return values


def _config_path(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def parse_args(argv):
    ap = build_parser()
    path = _config_path(argv)
    choices = ap._subparsers._group_actions[0].choices
    if path and argv and argv[0] in choices:
        sub = choices[argv[0]]
        defaults = _load_config(path, sub)
        for act in sub._actions:
            if act.dest in defaults:
                act.required = False
        sub.set_defaults(**defaults)
    return ap.parse_args(argv)


def config_echo(args):
    keep = {k: v for k, v in vars(args).items() if k not in ("out", "config", "output_format")}
    return clean(keep)


def execute(args):
    """Run one non-sweep command and return the :class:`Run`."""
    from . import experiments as ex

    c = args.command
    if c == "entire":
        return ex.run_entire(args.n, args.p, args.a0, args.r_max, args.A, args.kappa, args.delta)
    if c == "large":
        return ex.run_large(args.n, args.p, args.R, args.A)
    if c == "barrier":
        return ex.run_barrier(args.p, args.beta, args.phi_max, args.q, args.delta, args.r1, args.phi1)
    if c == "verify":
        return ex.run_verify(args.n, args.p, args.A, args.r0, args.r1)
    raise UsageError(f"unknown command {c!r}")


def _validate(args):
    from .problem import ProblemSpec

    if args.command in ("entire", "large", "verify"):
        spec = ProblemSpec(args.n, args.p, args.A)
        if args.command == "entire" and spec.regime != "subcritical":
            raise InputError("entire solutions need p < n")
        if args.command == "large" and spec.regime == "subcritical":
            raise InputError("large needs p >= n")
    if args.command == "barrier":
        from .barrier import BarrierParams

        BarrierParams(args.p, args.beta, q=args.q, delta=args.delta, r1=args.r1, phi1=args.phi1)


def write_csv(path, header, rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    np.savetxt(path, rows, delimiter=",", header=",".join(header), comments="", fmt="%.17e")


def write_json(path, payload):
    Path(path).write_text(json.dumps(clean(payload), indent=2, sort_keys=False) + "\n")


def write_svg(path, draw, title):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": "malab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        draw(ax)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def emit(run, args, stem, elapsed):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for k, (name, (header, rows)) in enumerate(run.tables.items()):
        path = out / (f"{stem}.csv" if k == 0 else f"{stem}_{name}.csv")
        write_csv(path, header, rows)
        files.append(path.name)
    summary = {
        "config": config_echo(args),
        "results": [c.as_dict() for c in run.checks],
        "residuals": run.residuals,
        "timings": run.counters,
    }
    write_json(out / f"{stem}.json", summary)
    files.append(f"{stem}.json")
    if args.plot and run.plot is not None:
        write_svg(out / f"{stem}.svg", run.plot, stem)
        files.append(f"{stem}.svg")
    write_json(out / f"{stem}.wallclock.json", {"seconds": round(elapsed, 6)})
    return files, summary


def _print_summary(summary, fmt, stream=None):
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(summary["results"]) + "\n")
        return
    stream.write("name,value,target,tolerance,pass\n")
    for r in summary["results"]:
        stream.write(f"{r['name']},{r['value']},{r['target']},{r['tolerance']},{r['pass']}\n")


def _fail_lines(run, stream=None):
    stream = stream or sys.stderr
    for c in run.checks:
        if not c.passed:
            stream.write("FAIL " + json.dumps({"check": c.name, "value": clean(c.value),
                                               "target": clean(c.target), "tolerance": clean(c.tolerance)}) + "\n")


def _single(args):
    stem = args.stem or args.command
    t0 = time.perf_counter()
    run = execute(args)
    _, summary = emit(run, args, stem, time.perf_counter() - t0)
    _print_summary(summary, args.output_format)
    _fail_lines(run)
    return EXIT_OK if run.passed else EXIT_FAIL


def _sweep_jobs(args):
    jobs = []
    if args.target == "barrier":
        for p, beta in itertools.product(args.p, args.beta):
            jobs.append((f"barrier_p{p:g}_beta{beta:g}", ["barrier", "--p", repr(p), "--beta", repr(beta)]))
    else:
        for n, p in itertools.product(args.n, args.p):
            base = ["--n", str(n), "--p", repr(p)]
            if args.target == "entire":
                for a0 in args.a0:
                    jobs.append((f"entire_n{n}_p{p:g}_a0{a0:g}",
                                 ["entire", *base, "--a0", repr(a0), "--r-max", repr(args.r_max)]))
            elif args.target == "large":
                jobs.append((f"large_n{n}_p{p:g}", ["large", *base, "--R", *map(repr, args.R)]))
            else:
                jobs.append((f"verify_n{n}_p{p:g}", ["verify", *base]))
    extra = ["--out", args.out] + (["--plot"] if args.plot else [])
    return [(stem, argv + ["--stem", stem] + extra) for stem, argv in jobs]


def _job(argv):
    return main(argv, quiet=True)


def _sweep(args):
    jobs = _sweep_jobs(args)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            codes = list(pool.map(_job, [a for _, a in jobs]))
    else:
        codes = [_job(a) for _, a in jobs]
    rows = [{"stem": s, "exit": c} for (s, _), c in zip(jobs, codes)]
    Path(args.out).mkdir(parents=True, exist_ok=True)
    write_json(Path(args.out) / f"{args.stem or 'sweep'}.json",
               {"config": config_echo(args), "runs": rows})
    for r in rows:
        print(f"{r['stem']},{r['exit']}")
    if any(c == EXIT_USAGE for c in codes):
        return EXIT_USAGE
    return EXIT_OK if all(c == EXIT_OK for c in codes) else EXIT_FAIL


def _accept(args):
    from .acceptance import run_suite

    results = run_suite(args.only, workdir=args.out)
    for r in results:
        print(r.line())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / f"{args.stem or 'accept'}.json",
               {"config": config_echo(args),
                "results": [c.as_dict() for r in results for c in r.checks]})
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _usage_line(message):
    sys.stderr.write("ERROR " + json.dumps({"kind": "usage", "message": str(message)}) + "\n")


def main(argv=None, quiet=False):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        if args.command not in ("sweep", "accept"):
            _validate(args)
    except UsageError as exc:
        _usage_line(exc)
        return EXIT_USAGE
    except InputError as exc:
        _usage_line(exc)
        return EXIT_USAGE
    except OSError as exc:
        _usage_line(exc)
        return EXIT_USAGE
    if quiet:
        args.output_format = "json"
    try:
        if args.command == "sweep":
            return _sweep(args)
        if args.command == "accept":
            return _accept(args)
        if quiet:
            stem = args.stem or args.command
            t0 = time.perf_counter()
            run = execute(args)
            emit(run, args, stem, time.perf_counter() - t0)
            _fail_lines(run)
            return EXIT_OK if run.passed else EXIT_FAIL
        return _single(args)
    except InputError as exc:
        _usage_line(exc)
        return EXIT_USAGE
    except MalabError as exc:
        sys.stderr.write("FAIL " + json.dumps({"check": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

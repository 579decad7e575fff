"""``cubeiso`` command line.

Exit codes: 0 success, 1 unexpected package error, 2 usage, 3 capacity guard,
4 verification failure, 5 structure error.
"""

import argparse
import json
import sys

from . import experiments as ex
from .errors import ArgumentError, CapacityError, CubeIsoError, StructureError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_VERIFY = 4
EXIT_STRUCTURE = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser():
    p = _Parser(prog="cubeiso", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt_default="json"):
        sp.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        sp.add_argument("--samples", type=int, default=ex.DEFAULT_SAMPLES,
                        help="Monte Carlo budget for sampled paths")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt_default)
        sp.add_argument("--out", metavar="PATH", help="write output here instead of stdout")

    a = sub.add_parser("analyze", help="all metrics of one function")
    a.add_argument("spec", help='"zoo:<name>,k=v...", "file:<path>" or "tribes-ce:n=<int>,seed=<int>"')
    a.add_argument("--no-eps", action="store_true", help="skip distance to monotonicity")
    common(a)

    c = sub.add_parser("counterexample", help="reproduce the tribes counterexample over seeds")
    c.add_argument("n", type=int, help="tribe count, a power of two")
    c.add_argument("--seeds", type=int, default=20, help="number of seeds starting at --seed")
    common(c)

    s = sub.add_parser("sweep", help="directed-KKL ratio over a list of n")
    s.add_argument("n_list", type=_int_list, help="comma-separated powers of two, e.g. 4,8,16")
    s.add_argument("--seeds", type=int, default=20)
    s.add_argument("--function", action="append", default=[], metavar="SPEC",
                   help="also report the ratio of this function (repeatable)")
    common(s, fmt_default="csv")

    v = sub.add_parser("verify", help="minimum inequality ratios over a corpus")
    v.add_argument("corpus", nargs="+",
                   help='items like "exhaustive:m=3", "random:m=6,count=100,seed=1" or a function spec')
    v.add_argument("--baselines", metavar="PATH", help="baseline JSON (default: bundled)")
    v.add_argument("--write-baselines", metavar="PATH",
                   help="store this run's minima as baselines and skip baseline checks")
    common(v)

    g = sub.add_parser("gen", help="write a truth-table file")
    g.add_argument("spec")
    g.add_argument("--out", metavar="PATH", required=True)
    g.add_argument("--table-format", choices=("json-bits", "raw"), default="json-bits")
    return p


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def _run(args):
    if args.command == "analyze":
        rec = ex.analyze(args.spec, samples=args.samples, seed=args.seed, with_eps=not args.no_eps)
        _emit(_dump(rec), args.out)
        return EXIT_OK
    if args.command == "counterexample":
        import time

        started = time.perf_counter()
        rows = ex.counterexample(args.n, args.seeds, args.samples, args.seed)
        if args.format == "csv":
            cols = ("n", "seed", "method", "max_neg_inf_first_block", "max_neg_inf_second_block",
                    "inv_n", "eps_or_proxy", "ratio")
            _emit(ex.rows_to_csv(rows, cols), args.out)
        else:
            params = {"n": args.n, "seeds": args.seeds, "seed": args.seed, "samples": args.samples}
            _emit(_dump(ex.make_record("counterexample", params, ex.rows_to_json(rows), started)), args.out)
        return EXIT_OK
    if args.command == "sweep":
        rows = ex.sweep(args.n_list, args.seeds, args.samples, args.seed, args.function)
        if args.format == "csv":
            _emit(ex.rows_to_csv(rows, ex.SWEEP_COLUMNS), args.out)
        else:
            _emit(_dump({"rows": ex.rows_to_json(rows),
                         "median_ratio": {str(k): v for k, v in ex.median_ratios(rows).items()}}),
                  args.out)
        return EXIT_OK
    if args.command == "verify":
        import time

        started = time.perf_counter()
        if args.write_baselines:
            baselines = {}
        elif args.baselines:
            with open(args.baselines) as fh:
                baselines = json.load(fh)
        else:
            baselines = None
        report = ex.verify(args.corpus, baselines=baselines)
        if args.write_baselines:
            with open(args.write_baselines, "w") as fh:
                json.dump(ex.baselines_from_report(report), fh, indent=2, sort_keys=True)
                fh.write("\n")
        _emit(_dump(ex.make_record("verify", {"corpus": args.corpus}, report, started)), args.out)
        if not report["ok"]:
            for line in report["failures"]:
                print(f"verification failure: {line}", file=sys.stderr)
            return EXIT_VERIFY
        return EXIT_OK
    if args.command == "gen":
        path = ex.gen(args.spec, args.out, args.table_format)
        print(path)
        return EXIT_OK
    raise AssertionError(args.command)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except _UsageError as exc:
        print(f"cubeiso: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        guard = f" [guard: {exc.guard}]" if exc.guard else ""
        print(f"cubeiso: capacity error{guard}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ArgumentError as exc:
        print(f"cubeiso: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StructureError as exc:
        print(f"cubeiso: structure error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    except CubeIsoError as exc:
        print(f"cubeiso: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Experiment drivers behind the CLI: analyze, counterexample, sweep, verify, gen."""

import json
import math
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from . import __version__
from .errors import ArgumentError, CapacityError
from .hypercube import BooleanFunction, load_function, save_function, to_json_bits
from .metrics import (
    UNDEFINED,
    inequality_report,
    inequality_report_json,
    influence_report,
    negative_influences,
    rational_json,
    sensitivity_profile,
    value_json,
)
from .monotone import (
    MATCHING_MAX_ARITY,
    MINCUT_MAX_ARITY,
    distance_to_monotone_exact,
    matching_lower_bound,
)
from .tribes import (
    ZooSpec,
    estimate_metrics,
    instance_from_json,
    instance_to_function,
    sample_counterexample,
    zoo,
)

BILINEAR_PROXY = "bilinear-proxy"
STRUCTURAL = "structural"
DEFAULT_SAMPLES = 100_000
EXACT_MAX_ARITY = MINCUT_MAX_ARITY

INEQUALITIES = (
    "poincare", "talagrand", "kkl", "eldan_gross", "directed_talagrand", "directed_kkl",
)


# --- function specs -----------------------------------------------------------


@dataclass(frozen=True)
class FunctionSpec:
    """Parsed ``zoo:...``, ``file:...`` or ``tribes-ce:...`` spec."""

    kind: str
    text: str
    zoo: ZooSpec = None
    path: str = None
    n: int = None
    seed: int = None


def _parse_int(token, key, value):
    try:
        return int(value, 0)
    except ValueError:
        raise ArgumentError(f"bad value for {key!r} in {token!r}: {value!r}")


def _kv_pairs(body, token):
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise ArgumentError(f"expected key=value, got {part!r} in {token!r}")
        k, v = part.split("=", 1)
        k = k.strip()
        if not k or k in out:
            raise ArgumentError(f"empty or repeated key {k!r} in {token!r}")
        out[k] = v.strip()
    return out


def parse_function_spec(text):
    if not isinstance(text, str) or ":" not in text:
        raise ArgumentError(f"unparseable function spec {text!r}; expected zoo:, file: or tribes-ce:")
    kind, body = text.split(":", 1)
    if kind == "file":
        if not body:
            raise ArgumentError(f"missing path in {text!r}")
        return FunctionSpec("file", text, path=body)
    if kind == "zoo":
        name, _, rest = body.partition(",")
        params = {k: _parse_int(text, k, v) for k, v in _kv_pairs(rest, text).items()}
        spec = ZooSpec.make(name.strip(), **params)
        spec.validate()
        return FunctionSpec("zoo", text, zoo=spec)
    if kind == "tribes-ce":
        kv = _kv_pairs(body, text)
        if "json" in kv:
            if set(kv) != {"json"}:
                raise ArgumentError(f"tribes-ce:json= takes no other keys: {text!r}")
            return FunctionSpec("tribes-ce", text, path=kv["json"])
        if set(kv) != {"n", "seed"}:
            raise ArgumentError(f"tribes-ce needs exactly n= and seed= (or json=), got {text!r}")
        return FunctionSpec(
            "tribes-ce", text, n=_parse_int(text, "n", kv["n"]), seed=_parse_int(text, "seed", kv["seed"])
        )
    raise ArgumentError(f"unknown function spec kind {kind!r} in {text!r}")


def resolve_instance(spec):
    if spec.path is not None:
        with open(spec.path) as fh:
            return instance_from_json(json.load(fh))
    return sample_counterexample(spec.n, spec.seed)


def resolve_function(spec):
    """Materialize a spec as a :class:`BooleanFunction`."""
    if isinstance(spec, str):
        spec = parse_function_spec(spec)
    if spec.kind == "zoo":
        return zoo(spec.zoo)
    if spec.kind == "file":
        try:
            return load_function(spec.path)
        except OSError as exc:
            raise ArgumentError(f"cannot read {spec.path!r}: {exc}")
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{spec.path!r} is not valid JSON: {exc}")
    return instance_to_function(resolve_instance(spec))


# --- records --------------------------------------------------------------


def make_record(command, parameters, results, started):
    return {
        "command": command,
        "parameters": parameters,
        "results": results,
        "wall_time": round(time.perf_counter() - started, 6),
        "version": __version__,
    }


def _directed_kkl(max_neg_inf, eps, m):
    if not eps or m < 2:
        return UNDEFINED
    return float(max_neg_inf) * m / (float(eps) * math.log(m))


def analyze_function(f, with_eps=True):
    """Every exact metric of ``f`` as a JSON-ready dict."""
    profile = sensitivity_profile(f)
    report = influence_report(f, profile=profile)
    out = {
        "arity": f.arity,
        "influence_report": report.to_json(),
        "sensitivity": profile.summary(),
    }
    eps = None
    if with_eps:
        if f.arity <= EXACT_MAX_ARITY:
            res = distance_to_monotone_exact(f)
            if f.arity <= MATCHING_MAX_ARITY:
                res = type(res)(res.eps, res.changed_points, res.method,
                                matching_lower_bound(f), res.witness)
            eps = res.eps
            out["eps"] = res.to_json()
        else:
            out["eps"] = None
            out["eps_skipped"] = f"arity {f.arity} above mincut guard {MINCUT_MAX_ARITY}"
    rows = inequality_report(f, eps=eps, report=report)
    out["inequalities"] = inequality_report_json(rows)
    return out


def analyze(spec_text, samples=DEFAULT_SAMPLES, seed=0, with_eps=True):
    started = time.perf_counter()
    spec = parse_function_spec(spec_text)
    params = {"spec": spec_text}
    if spec.kind == "tribes-ce":
        inst = resolve_instance(spec)
        results = {"instance": inst.to_json()}
        try:
            f = instance_to_function(inst)
        except CapacityError:
            params.update(samples=samples, seed=seed)
            rep = estimate_metrics(inst, samples, seed)
            results["method"] = BILINEAR_PROXY
            results["sampled"] = rep.to_json()
            results["directed_kkl_ratio"] = value_json(
                _directed_kkl(rep.max_neg_inf_y, rep.var_proxy, inst.arity)
            )
            return make_record("analyze", params, results, started)
        results.update(analyze_function(f, with_eps=with_eps))
    else:
        f = resolve_function(spec)
        results = analyze_function(f, with_eps=with_eps)
    return make_record("analyze", params, results, started)


# --- counterexample and sweep ---------------------------------------------


def counterexample_row(n, seed, samples=DEFAULT_SAMPLES):
    """One seed of the counterexample: block-wise Inf^-, eps and the ratio."""
    inst = sample_counterexample(n, seed)
    m = 2 * n
    if m <= EXACT_MAX_ARITY:
        f = instance_to_function(inst)
        neg = negative_influences(f)
        eps = distance_to_monotone_exact(f).eps
        first, second = max(neg[:n]), max(neg[n:])
        return {
            "n": n, "seed": seed, "method": "mincut",
            "max_neg_inf_first_block": first,
            "max_neg_inf_second_block": second,
            "inv_n": Fraction(1, n),
            "eps_or_proxy": eps,
            "ratio": _directed_kkl(max(first, second), eps, m),
        }
    rep = estimate_metrics(inst, samples, seed)
    return {
        "n": n, "seed": seed, "method": BILINEAR_PROXY,
        # the x-block is monotone by construction
        "max_neg_inf_first_block": Fraction(0),
        "max_neg_inf_second_block": rep.max_neg_inf_y,
        "inv_n": Fraction(1, n),
        "eps_or_proxy": rep.var_proxy,
        "ratio": _directed_kkl(rep.max_neg_inf_y, rep.var_proxy, m),
        "samples": samples,
        "se_eps_or_proxy": rep.se_var_proxy,
    }


def counterexample(n, seeds, samples=DEFAULT_SAMPLES, base_seed=0):
    return [counterexample_row(n, s, samples) for s in range(base_seed, base_seed + seeds)]


SWEEP_COLUMNS = ("n", "seed", "method", "max_neg_inf", "eps_or_proxy", "ratio")


def sweep(n_list, seeds, samples=DEFAULT_SAMPLES, base_seed=0, extra_specs=()):
    """Rows of SWEEP_COLUMNS, ordered by (n, seed); injected specs come last.

    An injected function reports its arity in the ``n`` column and an empty
    seed; its eps is exact (min cut).
    """
    rows = []
    for n in sorted(n_list):
        for r in counterexample(n, seeds, samples, base_seed):
            rows.append({
                "n": r["n"], "seed": r["seed"], "method": r["method"],
                "max_neg_inf": max(r["max_neg_inf_first_block"], r["max_neg_inf_second_block"]),
                "eps_or_proxy": r["eps_or_proxy"], "ratio": r["ratio"],
            })
    for text in extra_specs:
        f = resolve_function(text)
        if f.arity > EXACT_MAX_ARITY:
            raise CapacityError(f"injected function {text!r} is above the mincut guard",
                                guard="mincut", limit=MINCUT_MAX_ARITY, value=f.arity)
        eps = distance_to_monotone_exact(f).eps
        mx = max(negative_influences(f))
        rows.append({
            "n": f.arity, "seed": "", "method": "mincut", "max_neg_inf": mx,
            "eps_or_proxy": eps, "ratio": _directed_kkl(mx, eps, f.arity), "spec": text,
        })
    return rows


def median_ratios(rows):
    """Median ratio per n over the tribes rows (injected rows are skipped)."""
    by_n = {}
    for r in rows:
        if "spec" in r or r["ratio"] == UNDEFINED:
            continue
        by_n.setdefault(r["n"], []).append(float(r["ratio"]))
    return {n: statistics.median(v) for n, v in sorted(by_n.items())}


def csv_value(v):
    if isinstance(v, Fraction):
        return repr(float(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, columns):
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(csv_value(r[c]) for c in columns))
    return "\n".join(lines) + "\n"


def rows_to_json(rows):
    return [{k: value_json(v) if not isinstance(v, (int, str)) else v for k, v in r.items()} for r in rows]


# --- verify ---------------------------------------------------------------

EXHAUSTIVE_MAX_ARITY = 4


def _corpus_functions(item):
    """Yield ``(witness_label, BooleanFunction)`` for one corpus item."""
    kind, _, body = item.partition(":")
    if kind == "exhaustive":
        kv = _kv_pairs(body, item)
        if set(kv) != {"m"}:
            raise ArgumentError(f"exhaustive corpus needs exactly m=, got {item!r}")
        m = _parse_int(item, "m", kv["m"])
        if not 1 <= m <= EXHAUSTIVE_MAX_ARITY:
            raise CapacityError(f"exhaustive corpus supports m <= {EXHAUSTIVE_MAX_ARITY}",
                                guard="exhaustive", limit=EXHAUSTIVE_MAX_ARITY, value=m)
        size = 1 << m
        shifts = np.arange(size, dtype=np.uint64)
        for t in range(1 << size):
            bits = (np.uint64(t) >> shifts) & np.uint64(1)
            f = BooleanFunction(m, bits.astype(np.uint8))
            yield f"table:m={m},bits={f.bitstring()}", f
    elif kind == "random":
        kv = _kv_pairs(body, item)
        if set(kv) != {"m", "count", "seed"}:
            raise ArgumentError(f"random corpus needs m=, count= and seed=, got {item!r}")
        m, count, seed = (_parse_int(item, k, kv[k]) for k in ("m", "count", "seed"))
        if not 1 <= m <= EXACT_MAX_ARITY or count < 1:
            raise ArgumentError(f"bad random corpus parameters in {item!r}")
        rng = np.random.default_rng(seed)
        for j in range(count):
            f = BooleanFunction(m, rng.integers(0, 2, size=1 << m, dtype=np.uint8))
            yield f"{item}#{j}", f
    else:
        yield item, resolve_function(item)


def function_ratios(f):
    """Ratios of all six inequalities for one function (eps by min cut)."""
    eps = distance_to_monotone_exact(f).eps if f.arity <= EXACT_MAX_ARITY else None
    rows = inequality_report(f, eps=eps)
    return {name: row.ratio for name, row in rows.items()}


def load_baselines():
    text = resources.files("cubeiso").joinpath("baselines.json").read_text()
    return json.loads(text)


def verify(items, baselines=None, rel_tol=1e-9):
    """Minimum ratio per inequality per corpus item, with pass/fail.

    Fails when Poincare's ratio drops below 1 or an observed minimum falls
    below a stored baseline for the same corpus item.
    """
    if baselines is None:
        baselines = load_baselines()
    report = {"items": [], "ok": True, "failures": []}
    for item in items:
        mins = {}
        count = 0
        for label, f in _corpus_functions(item):
            count += 1
            for name, ratio in function_ratios(f).items():
                if ratio == UNDEFINED:
                    continue
                r = float(ratio) if not isinstance(ratio, Fraction) else ratio
                if name not in mins or r < mins[name][0]:
                    mins[name] = (r, label)
        entry = {"corpus": item, "functions": count, "minima": {}}
        base = baselines.get(item, {})
        for name in INEQUALITIES:
            if name not in mins:
                entry["minima"][name] = {"ratio": UNDEFINED, "witness": None}
                continue
            r, label = mins[name]
            entry["minima"][name] = {"ratio": value_json(r), "witness": label}
            if name == "poincare" and r < 1:
                report["failures"].append(f"{item}: Poincare violated by {label} (ratio {r})")
            if name in base and float(r) < base[name] * (1 - rel_tol):
                report["failures"].append(
                    f"{item}: {name} minimum {float(r)!r} below baseline {base[name]!r} ({label})"
                )
        report["items"].append(entry)
    report["ok"] = not report["failures"]
    return report


def baselines_from_report(report):
    out = {}
    for entry in report["items"]:
        vals = {}
        for name, v in entry["minima"].items():
            r = v["ratio"]
            if r == UNDEFINED:
                continue
            vals[name] = r["num"] / r["den"] if isinstance(r, dict) else r
        out[entry["corpus"]] = vals
    return out


# --- gen -----------------------------------------------------------------


def gen(spec_text, path, fmt="json-bits"):
    f = resolve_function(spec_text)
    return save_function(f, path, fmt)


__all__ = [
    "BILINEAR_PROXY",
    "FunctionSpec",
    "analyze",
    "analyze_function",
    "counterexample",
    "counterexample_row",
    "function_ratios",
    "gen",
    "median_ratios",
    "parse_function_spec",
    "resolve_function",
    "rows_to_csv",
    "sweep",
    "to_json_bits",
    "rational_json",
    "verify",
]

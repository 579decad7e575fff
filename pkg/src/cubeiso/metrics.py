"""Sensitivity, influence and the functionals of the classical cube inequalities.

Probabilities that are counts over a power of two are exact ``Fraction``
values; square-root and logarithm functionals are floats. Logarithms are
natural. Ratios with a zero denominator are reported as :data:`UNDEFINED`.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .errors import ArgumentError, UndefinedRatioError
from .hypercube import check_coordinate, mean_variance

UNDEFINED = "undefined"


def rational_json(q):
    return {"num": q.numerator, "den": q.denominator}


def value_json(v):
    if isinstance(v, Fraction):
        return rational_json(v)
    if v is None:
        return None
    if isinstance(v, str):
        return v
    return float(v)


@dataclass(frozen=True)
class SensitivityProfile:
    arity: int
    sens: np.ndarray
    neg_sens: np.ndarray

    def mean_sensitivity(self):
        return Fraction(int(self.sens.sum(dtype=np.int64)), self.sens.size)

    def summary(self):
        """Histograms and exact means; the full arrays are too big for reports."""
        m = self.arity
        return {
            "arity": m,
            "sens_histogram": np.bincount(self.sens, minlength=m + 1).tolist(),
            "neg_sens_histogram": np.bincount(self.neg_sens, minlength=m + 1).tolist(),
            "mean_sens": rational_json(self.mean_sensitivity()),
            "mean_neg_sens": rational_json(
                Fraction(int(self.neg_sens.sum(dtype=np.int64)), self.neg_sens.size)
            ),
            "max_sens": int(self.sens.max()),
            "max_neg_sens": int(self.neg_sens.max()),
        }


def sensitivity_profile(f):
    """Per-point sens_f and sens^-_f.

    ``neg_sens[x]`` counts coordinates i with x_i = 0, f(x) = 1 and
    f(x^(+i)) = 0, so each decreasing edge is charged to its lower endpoint.
    """
    sens, neg = kernels.sensitivity_counts(f.bits, f.arity)
    sens.flags.writeable = False
    neg.flags.writeable = False
    return SensitivityProfile(f.arity, sens, neg)


def _edge_arrays(f):
    return kernels.all_edge_counts(f.words, f.arity)


def influence(f, i):
    check_coordinate(i, f.arity)
    diff, _ = kernels.edge_counts(f.words, f.arity, i - 1)
    return Fraction(2 * diff, f.size)


def negative_influence(f, i):
    """Decreasing i-edges divided by 2^(m-1)."""
    check_coordinate(i, f.arity)
    _, dec = kernels.edge_counts(f.words, f.arity, i - 1)
    return Fraction(dec, f.size // 2)


def influences(f):
    diff, _ = _edge_arrays(f)
    return [Fraction(2 * int(d), f.size) for d in diff]


def negative_influences(f):
    _, dec = _edge_arrays(f)
    return [Fraction(int(d), f.size // 2) for d in dec]


def total_influence(f):
    diff, _ = _edge_arrays(f)
    return Fraction(2 * int(diff.sum()), f.size)


def _mean_sqrt(counts, m):
    hist = np.bincount(counts, minlength=m + 1)
    return float(np.dot(hist, np.sqrt(np.arange(hist.size)))) / counts.size


def talagrand_functional(f, directed=False, profile=None):
    """E_x[sqrt(sens_f(x))], or E_x[sqrt(sens^-_f(x))] when ``directed``."""
    if profile is None:
        profile = sensitivity_profile(f)
    return _mean_sqrt(profile.neg_sens if directed else profile.sens, f.arity)


def _eg_rhs(variance, inf_sq):
    if variance == 0:
        return 0.0
    return float(variance) * math.sqrt(math.log(2 + math.e / float(inf_sq)))


def eldan_gross_rhs(f):
    """Var[f] * sqrt(log(2 + e / sum_i Inf_i^2)); zero when Var[f] = 0."""
    _, var = mean_variance(f)
    return _eg_rhs(var, sum(q * q for q in influences(f)))


def _kkl_ratio(max_inf, var, m):
    if var == 0 or m < 2:
        raise UndefinedRatioError(
            f"KKL ratio undefined (variance {var}, arity {m})"
        )
    return float(max_inf) * m / (float(var) * math.log(m))


def kkl_witness_ratio(f):
    """max_i Inf_i * m / (Var[f] * log m)."""
    _, var = mean_variance(f)
    return _kkl_ratio(max(influences(f)), var, f.arity)


@dataclass(frozen=True)
class InfluenceReport:
    inf: list
    neg_inf: list
    total_influence: Fraction
    variance: Fraction
    talagrand: float
    directed_talagrand: float
    eg_rhs: float
    kkl_witness_ratio: object  # float or UNDEFINED

    def to_json(self):
        return {
            "inf": [rational_json(q) for q in self.inf],
            "neg_inf": [rational_json(q) for q in self.neg_inf],
            "total_influence": rational_json(self.total_influence),
            "variance": rational_json(self.variance),
            "talagrand": self.talagrand,
            "directed_talagrand": self.directed_talagrand,
            "eg_rhs": self.eg_rhs,
            "kkl_witness_ratio": value_json(self.kkl_witness_ratio),
        }


def influence_report(f, profile=None):
    if profile is None:
        profile = sensitivity_profile(f)
    m = f.arity
    diff, dec = _edge_arrays(f)
    inf = [Fraction(2 * int(d), f.size) for d in diff]
    neg_inf = [Fraction(int(d), f.size // 2) for d in dec]
    _, var = mean_variance(f)
    try:
        kkl = _kkl_ratio(max(inf), var, m)
    except UndefinedRatioError:
        kkl = UNDEFINED
    return InfluenceReport(
        inf=inf,
        neg_inf=neg_inf,
        total_influence=sum(inf, Fraction(0)),
        variance=var,
        talagrand=_mean_sqrt(profile.sens, m),
        directed_talagrand=_mean_sqrt(profile.neg_sens, m),
        eg_rhs=_eg_rhs(var, sum(q * q for q in inf)),
        kkl_witness_ratio=kkl,
    )


@dataclass(frozen=True)
class InequalityRow:
    name: str
    lhs: object
    rhs: object
    ratio: object

    def to_json(self):
        return {
            "lhs": value_json(self.lhs),
            "rhs": value_json(self.rhs),
            "ratio": value_json(self.ratio),
        }


def _ratio(lhs, rhs):
    if rhs == 0:
        return UNDEFINED
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        return lhs / rhs
    return float(lhs) / float(rhs)


def inequality_report(f, eps=None, directed=None, report=None):
    """LHS, constant-free RHS and their ratio for each cube inequality.

    Rows: poincare, talagrand, kkl, eldan_gross and, when ``eps`` (the
    distance to monotonicity) is given or ``directed`` is requested,
    directed_talagrand and directed_kkl. Returns ``{name: InequalityRow}``.
    """
    if directed is None:
        directed = eps is not None
    if directed and eps is None:
        raise ArgumentError("directed ratios need the distance to monotonicity (eps)")
    if report is None:
        report = influence_report(f)
    m = f.arity
    var = report.variance
    log_term = math.log(m) / m if m >= 2 else 0.0
    rows = {}

    def add(name, lhs, rhs):
        rows[name] = InequalityRow(name, lhs, rhs, _ratio(lhs, rhs))

    add("poincare", report.total_influence, var)
    add("talagrand", report.talagrand, var)
    add("kkl", max(report.inf), float(var) * log_term)
    add("eldan_gross", report.talagrand, report.eg_rhs)
    if directed:
        eps = Fraction(eps)
        add("directed_talagrand", report.directed_talagrand, eps)
        add("directed_kkl", max(report.neg_inf), float(eps) * log_term)
    return rows


def inequality_report_json(rows):
    return {name: row.to_json() for name, row in rows.items()}

"""Asymptotic regime conditions, universal energy bounds and composition.

An asymptotic ``a << b`` is read as ``a <= rho * b`` and ``a >> b`` as
``a >= b / rho``; a bounded quantity ``a <= c`` uses an explicit constant
``c`` (default 1).  Both knobs are parameters of :func:`classify`.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import InvalidParameterError, InvariantViolationError

DEFAULT_RHO = 0.1
DEFAULT_C = 1.0
LABELS = ("QL", "A-WI", "A-TF", "B-WI", "B-TF")


@dataclass(frozen=True)
class PhysicalParams:
    g: float
    omega_perp: float
    epsilon: float
    Omega: float = 0.0
    T: float = 1.0
    N: int = 1

    def __post_init__(self):
        if self.g < 0:
            raise InvalidParameterError("g must be non-negative")
        if not self.omega_perp > 0:
            raise InvalidParameterError("omega_perp must be positive")
        if not 0 <= self.Omega < self.omega_perp:
            raise InvalidParameterError("rotation must satisfy 0 <= Omega < omega_perp")
        if not self.epsilon > 0 or not self.T > 0:
            raise InvalidParameterError("epsilon and T must be positive")
        if self.N < 1:
            raise InvalidParameterError("N must be >= 1")

    @property
    def delta_perp(self):
        return self.omega_perp - self.Omega


def transverse_spectrum(params, j=0, k=0):
    """``omega + (omega - Omega) j + (omega + Omega) k``."""
    if j < 0 or k < 0:
        raise InvalidParameterError("indices must be non-negative")
    w, O = params.omega_perp, params.Omega
    return w + (w - O) * j + (w + O) * k


@dataclass
class Condition:
    name: str
    kind: str  # "<<", ">>" or "<=c"
    lhs: float
    rhs: float
    ratio: float
    verdict: bool


def _cond(name, kind, lhs, rhs, rho, c):
    if kind == "<<":
        ratio = lhs / rhs if rhs else math.inf
        ok = lhs <= rho * rhs
    elif kind == ">>":
        ratio = rhs / lhs if lhs else math.inf
        ok = lhs >= rhs / rho
    else:
        ratio = lhs / c
        ok = lhs <= c
    return Condition(name, kind, float(lhs), float(rhs if kind != "<=c" else c), float(ratio), bool(ok))


@dataclass
class RegimeReport:
    params: dict
    rho: float
    c: float
    conditions: list
    regime: str
    satisfied: list
    predicted_route: str | None
    predicted_order: float | None
    order_label: str | None
    m_A_source: str
    m_B_source: str
    bounds: dict | None = None
    extra: dict = field(default_factory=dict)

    def condition(self, name):
        return next(c for c in self.conditions if c.name == name)

    def to_dict(self):
        d = asdict(self)
        d["conditions"] = [asdict(c) for c in self.conditions]
        return d


def classify(params, rho=DEFAULT_RHO, c=DEFAULT_C, m_A=None, m_B=None):
    """Evaluate every regime condition and pick a reduced model.

    ``m_A`` / ``m_B`` (measured reduced minima) enter the rotation and
    reduction checks when supplied; otherwise the regime's predicted order
    is used and the report says so.
    """
    if not 0 < rho < 1:
        raise InvalidParameterError("rho must lie in (0, 1)")
    g, w, eps, d = params.g, params.omega_perp, params.epsilon, params.delta_perp
    se = math.sqrt(eps)
    rows = [
        _cond("QLa", "<<", g, se, rho, c),
        _cond("QLb", "<<", g * w * se, 1.0, rho, c),
        _cond("AWIa", ">>", eps * d, 1.0, rho, c),
        _cond("AWIb", "<=c", g * w * se, None, rho, c),
        _cond("ATFa", ">>", g * w * se, 1.0, rho, c),
        _cond("ATFb", "<=c", g * w * eps ** 2, None, rho, c),
        _cond("ATFc", "<<", g ** (5 / 12) * eps ** (-1 / 6) * w ** (5 / 12), d ** 0.375, rho, c),
        _cond("BWIa", "<=c", g / se, None, rho, c),
        _cond("BWIb", "<<", w * eps, 1.0, rho, c),
        _cond("BTFa", "<<", se, g, rho, c),
        _cond("BTFb", "<<", w * math.sqrt(g) * eps ** 0.75, 1.0, rho, c),
        _cond("BTFc", "<<", g ** 1.5 * eps ** 0.25 * w, 1.0, rho, c),
    ]
    ok = {r.name: r.verdict for r in rows}
    satisfied = []
    if ok["QLa"] or ok["QLb"]:
        satisfied.append("QL")
    if ok["AWIa"] and ok["AWIb"]:
        satisfied.append("A-WI")
    if ok["ATFa"] and ok["ATFb"] and ok["ATFc"]:
        satisfied.append("A-TF")
    if ok["BWIa"] and ok["BWIb"]:
        satisfied.append("B-WI")
    if ok["BTFa"] and ok["BTFb"] and ok["BTFc"]:
        satisfied.append("B-TF")
    regime = satisfied[0] if satisfied else "unclassified"

    order_A = (1 / eps, "1/eps") if regime in ("QL", "A-WI") else ((g * w / eps) ** (2 / 3), "(g omega/eps)^(2/3)")
    g_tilde_order = g / se
    order_B = (w, "omega") if regime == "B-WI" else (w * math.sqrt(g_tilde_order), "omega sqrt(g eps^-1/2)")
    if regime in ("QL", "A-WI", "A-TF"):
        route, (order, olabel) = "A", order_A
    elif regime in ("B-WI", "B-TF"):
        route, (order, olabel) = "B", order_B
    else:
        route, order, olabel = None, None, None

    mA = m_A if m_A is not None else max(1 / eps, (g * w / eps) ** (2 / 3))
    mB = m_B if m_B is not None else max(w, w * math.sqrt(g_tilde_order))
    rows += [
        _cond("AOmega_a", "<<", mA / d, 1.0, rho, c),
        _cond("AOmega_b", "<<", g * (2 * w - params.Omega) * mA * d ** -1.5, 1.0, rho, c),
        _cond("RBa", "<<", eps * mB, 1.0, rho, c),
        _cond("RBb", "<<", g * mB * se, 1.0, rho, c),
    ]
    return RegimeReport(asdict(params), rho, c, rows, regime, satisfied, route, order, olabel,
                        "measured" if m_A is not None else "predicted order",
                        "measured" if m_B is not None else "predicted order")


def interaction_scale(params, phi1_l4):
    """``I_N = g omega int phi_1^4 / (2 N pi)``."""
    return params.g * params.omega_perp * phi1_l4 / (2 * params.N * math.pi)


def universal_bounds(params, lambda1z, phi1_l4):
    """``lambda_1 + omega <= E <= lambda_1 + omega + I_N``."""
    I_N = interaction_scale(params, phi1_l4)
    lower = lambda1z + params.omega_perp
    return {"lower": lower, "upper": lower + I_N, "I_N": I_N}


def compose(params, route, lambda1z, phi1_l4, m_A=None, m_B=None, rtol=1e-9):
    """Predicted ground energy from a reduced model, checked against the bounds.

    Route A: ``omega + m_A^N``; route B: ``lambda_1 + m_B`` (with ``m_B``
    computed at the per-period coupling ``g int phi_1^4 / N``).
    """
    if route == "A":
        if m_A is None:
            raise InvalidParameterError("route A needs m_A")
        E = params.omega_perp + m_A
    elif route == "B":
        if m_B is None:
            raise InvalidParameterError("route B needs m_B")
        E = lambda1z + m_B
    else:
        raise InvalidParameterError("route must be 'A' or 'B'")
    b = universal_bounds(params, lambda1z, phi1_l4)
    slack = rtol * max(1.0, abs(b["upper"]))
    if not b["lower"] - slack <= E <= b["upper"] + slack:
        raise InvariantViolationError(f"composed energy {E} outside [{b['lower']}, {b['upper']}]")
    return {"E": E, **b, "route": route}


def write_report_json(report, path):
    def fmt(v):
        if isinstance(v, float):
            return v if not math.isfinite(v) else float(f"{v:.15g}")
        if isinstance(v, dict):
            return {k: fmt(x) for k, x in v.items()}
        if isinstance(v, list):
            return [fmt(x) for x in v]
        return v
    data = report.to_dict() if isinstance(report, RegimeReport) else report
    with open(path, "w") as fh:
        json.dump(fmt(data), fh, indent=2, sort_keys=True)
    return path

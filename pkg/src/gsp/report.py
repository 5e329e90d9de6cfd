"""Report assembly, Monte-Carlo dominance checks and epsilon sweeps.

Every number in a :class:`Report` is an :class:`Entry` tagged with where it
came from: ``linear``, ``nonlinear``, ``exact`` (refactorization) or
``reference`` (classical comparison quantities).  Indices in reports are
1-based.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linear_bounds as lb
from . import nonlinear_bounds as nlb
from . import reference_bounds as rb
from .errors import GSPError
from .gqz import (
    AS_COMPUTED,
    DESCENDING,
    MatrixPair,
    exact_perturbations,
    generalized_eigenpairs,
    generalized_schur,
)
from .matrixkit import sl_pairs
from .problem import ProblemFile

ORDER_CHOICES = ("printed", "descending", "as-computed")


@dataclass
class Entry:
    section: str
    name: str
    index: str
    value: float
    provenance: str
    status: str = "ok"


@dataclass
class ReportOptions:
    linear: bool = True
    nonlinear: bool = True
    compare: bool = True
    exact: bool = True
    ps: tuple | None = None
    order: str = "printed"
    tol: float = 1e-12
    max_iter: int = 30
    strict: bool = False
    nonlinear_mode: str = "bound"


@dataclass
class Report:
    problem: str
    n: int
    lambdas: list
    delta_norm: float
    entries: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def values(self, section: str, name: str) -> np.ndarray:
        """Values of one named quantity in entry order."""
        return np.array([e.value for e in self.entries if e.section == section and e.name == name])

    def to_json(self) -> str:
        d = {
            "problem": self.problem, "n": self.n,
            "lambdas": [[z.real, z.imag] for z in self.lambdas],
            "delta_norm": self.delta_norm, "flags": self.flags,
            "entries": [asdict(e) for e in self.entries],
        }
        return json.dumps(d, sort_keys=True, indent=1, allow_nan=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "name", "index", "value", "provenance", "status"])
        for e in self.entries:
            w.writerow([e.section, e.name, e.index, repr(e.value), e.provenance, e.status])
        return buf.getvalue()

    def to_table(self) -> str:
        lines = [f"problem {self.problem}  n={self.n}  ||[dA;dB]||_F = {self.delta_norm:.8e}"]
        lines.append("eigenvalues (diagonal order): " + ", ".join(_fmt_complex(z) for z in self.lambdas))
        for k, v in sorted(self.flags.items()):
            lines.append(f"flag {k}: {v}")
        current = None
        for e in self.entries:
            key = (e.section, e.name)
            if key != current:
                lines.append(f"\n[{e.section}] {e.name}  ({e.provenance})")
                current = key
            tail = "" if e.status == "ok" else f"  [{e.status}]"
            lines.append(f"  {e.index:>6}  {e.value: .8e}{tail}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "table":
            return self.to_table()
        raise ValueError(f"unknown format {fmt!r}")


def _fmt_complex(z) -> str:
    if not np.isfinite(z):
        return "inf"
    if z.imag == 0:
        return f"{z.real:.8f}"
    return f"{z.real:.8f}{z.imag:+.8f}i"


def resolve_order(problem: ProblemFile, order: str):
    if order == "printed":
        return problem.order if problem.order is not None else AS_COMPUTED
    if order == "descending":
        return DESCENDING
    if order == "as-computed":
        return AS_COMPUTED
    raise ValueError(f"order must be one of {ORDER_CHOICES}, got {order!r}")


def _add_vector(entries, section, name, v, prov, status=None):
    for k, x in enumerate(np.asarray(v).ravel()):
        st = "ok" if status is None else status[k]
        entries.append(Entry(section, name, str(k + 1), float(x), prov, st))


def _add_sl(entries, section, name, v, n, prov):
    for (i, j), x in zip(sl_pairs(n), v):
        entries.append(Entry(section, name, f"{i + 1},{j + 1}", float(x), prov))


def _add_matrix(entries, section, name, M, prov, upper=False):
    n = M.shape[0]
    for i in range(n):
        for j in range(i if upper else 0, n):
            entries.append(Entry(section, name, f"{i + 1},{j + 1}", float(M[i, j]), prov))


def run_report(problem: ProblemFile, options: ReportOptions | None = None) -> Report:
    """Run the full pipeline on ``problem``: factorize, bound, compare, refine."""
    opt = options or ReportOptions()
    pair = MatrixPair(problem.A, problem.B)
    n = pair.n
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        schur = generalized_schur(pair, order=resolve_order(problem, opt.order))
    ps = tuple(range(1, n)) if opt.ps is None else tuple(opt.ps)
    bundle = lb.linear_bundle(schur, problem.dA, problem.dB, ps=ps)
    rep = Report(problem=problem.name, n=n, lambdas=[complex(z) for z in schur.lambdas], delta_norm=bundle.delta_norm)
    if caught:
        rep.flags["clustered"] = True
    E = rep.entries

    ex = None
    if opt.exact or opt.compare:
        ex = exact_perturbations(pair, problem.dA, problem.dB, base=schur)

    if opt.linear:
        _add_sl(E, "linear", "|x_lin|", bundle.x_bound, n, "linear")
        _add_sl(E, "linear", "|y_lin|", bundle.y_bound, n, "linear")
        _add_matrix(E, "linear", "|dU|", bundle.U_bound, "linear")
        _add_matrix(E, "linear", "|dV|", bundle.V_bound, "linear")
        _add_matrix(E, "linear", "|dT|", bundle.T_bound, "linear", upper=True)
        _add_matrix(E, "linear", "|dR|", bundle.R_bound, "linear", upper=True)
        _add_vector(E, "linear", "t_i", bundle.t_bound, "linear")
        _add_vector(E, "linear", "r_i", bundle.r_bound, "linear")
        _add_vector(E, "linear", "C2", bundle.eig_chordal_bounds, "linear", bundle.eig_chordal_status)
        _add_vector(E, "linear", "cond1", bundle.eig_conditions, "linear")
        for p in ps:
            sb = bundle.subspace[p]
            E.append(Entry("linear", "cond(Theta)", str(p), sb.cond_theta, "linear"))
        for p in ps:
            sb = bundle.subspace[p]
            E.append(Entry("linear", "Theta_lin", str(p), sb.theta_lin, "linear", "saturated" if sb.saturated else "ok"))

    if opt.exact and ex is not None:
        _add_sl(E, "exact", "|x|", np.abs(ex.x), n, "exact")
        _add_sl(E, "exact", "|y|", np.abs(ex.y), n, "exact")
        _add_matrix(E, "exact", "|dU|", np.abs(ex.dU), "exact")
        _add_matrix(E, "exact", "|dV|", np.abs(ex.dV), "exact")
        _add_matrix(E, "exact", "|dT|", np.abs(ex.dT), "exact", upper=True)
        _add_matrix(E, "exact", "|dR|", np.abs(ex.dR), "exact", upper=True)
        _add_vector(E, "exact", "|dt_ii|", np.abs(np.diag(ex.dT)), "exact")
        _add_vector(E, "exact", "|dr_ii|", np.abs(np.diag(ex.dR)), "exact")
        for p in ps:
            E.append(Entry("exact", "Theta_max", str(p), lb.exact_subspace_angle(ex.dK, p), "exact"))

    if opt.compare:
        pairs = generalized_eigenpairs(pair, schur=schur)
        cr = rb.comparison_report(schur, pairs, bundle, problem.dA, problem.dB, E=problem.E, F=problem.F, exact=ex, ps=ps)
        _add_vector(E, "reference", "C", cr.C, "exact")
        _add_vector(E, "reference", "C1", cr.C1, "reference")
        _add_vector(E, "reference", "cond2", cr.cond2, "reference")
        _add_vector(E, "reference", "cond3", cr.cond3, "reference")
        _add_vector(E, "reference", "cond4", cr.cond4, "reference")
        for p in ps:
            E.append(Entry("reference", "s", str(p), cr.s[p], "reference"))
        for p in ps:
            E.append(Entry("reference", "dif_inv", str(p), cr.dif_inv[p], "reference"))
        if cr.status:
            rep.flags["reference"] = cr.status

    if opt.nonlinear:
        st = nlb.nonlinear_iterate(schur, bundle.system, (bundle.x_bound, bundle.y_bound), q=opt.max_iter,
                                   tol=opt.tol, mode=opt.nonlinear_mode, strict=opt.strict)
        rep.flags["nonlinear_iterations"] = st.iterations
        rep.flags["nonlinear_converged"] = st.converged
        status = "ok" if st.converged else "nonconvergence"
        Unl, Vnl = nlb.nonlinear_uv(schur.U, schur.V, st)
        Tnl, Rnl = nlb.nonlinear_tr(schur.U, schur.V, schur.A, schur.B, problem.dA, problem.dB, st)
        so = nlb.nonlinear_diag_second_order(schur.T, schur.R, schur.U, schur.V, schur.A, schur.B, st)
        tnl, rnl = nlb.nonlinear_diagonal_bounds(bundle.t_bound, bundle.r_bound, so)
        start = len(E)
        _add_sl(E, "nonlinear", "|x_nl|", st.x_nl, n, "nonlinear")
        _add_sl(E, "nonlinear", "|y_nl|", st.y_nl, n, "nonlinear")
        _add_matrix(E, "nonlinear", "|dU|", Unl, "nonlinear")
        _add_matrix(E, "nonlinear", "|dV|", Vnl, "nonlinear")
        _add_matrix(E, "nonlinear", "|dT|", Tnl, "nonlinear", upper=True)
        _add_matrix(E, "nonlinear", "|dR|", Rnl, "nonlinear", upper=True)
        _add_vector(E, "nonlinear", "t_i", tnl, "nonlinear")
        _add_vector(E, "nonlinear", "r_i", rnl, "nonlinear")
        for p in ps:
            sb = nlb.nonlinear_invariant(st, p)
            E.append(Entry("nonlinear", "Theta_nl", str(p), sb.theta_lin, "nonlinear", "saturated" if sb.saturated else "ok"))
        for e in E[start:]:
            if e.status == "ok":
                e.status = status
    return rep


# -------------------------------------------------------------- Monte-Carlo


@dataclass
class MonteCarloResult:
    eps: float
    samples: int
    seed: int
    factor: float
    violations: dict
    worst_ratio: dict
    failures: list

    @property
    def total_violations(self) -> int:
        return int(sum(self.violations.values()))


def _ratio(exact, bound):
    exact = np.abs(np.asarray(exact))
    bound = np.asarray(bound)
    mask = bound > 0
    if not mask.any():
        return np.zeros(0)
    return exact[mask] / bound[mask]


def _sample_ratios(schur, sysL, pair, dA, dB) -> dict:
    delta = lb.stacked_norm(dA, dB)
    n = schur.n
    xb, yb = lb.xy_linear_bounds(sysL, delta)
    W, K = lb.hat_WK(xb, yb, n)
    Ub, Vb = lb.uv_bounds(schur.U, schur.V, W, K)
    Tb, Rb = lb.tr_bounds(schur.U, schur.V, schur.A, schur.B, dA, dB, W, K)
    dsys = lb.build_Z(schur.T, schur.R, sysL)
    tb, rb_ = lb.diagonal_bounds(dsys, delta)
    ex = exact_perturbations(pair, dA, dB, base=schur)
    iu = np.triu_indices(n)
    out = {
        "x": _ratio(ex.x, xb), "y": _ratio(ex.y, yb),
        "U": _ratio(ex.dU, Ub), "V": _ratio(ex.dV, Vb),
        "T": _ratio(ex.dT[iu], Tb[iu]), "R": _ratio(ex.dR[iu], Rb[iu]),
        "t": _ratio(np.diag(ex.dT), tb), "r": _ratio(np.diag(ex.dR), rb_),
    }
    sub = lb.build_Ltilde(sysL)
    out["theta"] = np.array([
        lb.exact_subspace_angle(ex.dK, p) / b.theta_lin
        for p in range(1, n)
        for b in [lb.invariant_subspace_bound(sub, p, delta)] if b.theta_lin > 0
    ])
    return out


def monte_carlo_verify(problem: ProblemFile, eps: float, samples: int, seed: int, factor: float = 1.01,
                       order: str = "printed") -> MonteCarloResult:
    """Check the linear bounds against exact refactorization on random perturbations.

    ``(dA, dB)`` have i.i.d. standard complex Gaussian entries, rescaled so
    that ``||[dA; dB]||_F = eps``.  A violation is an entry whose exact
    value exceeds ``factor`` times its bound.  Samples whose refactorization
    fails are listed in ``failures``.
    """
    if eps <= 0 or samples < 1:
        raise ValueError("need eps > 0 and samples >= 1")
    pair = MatrixPair(problem.A, problem.B)
    schur = generalized_schur(pair, order=resolve_order(problem, order))
    sysL = lb.build_L(schur.T, schur.R)
    rng = np.random.default_rng(seed)
    n = pair.n
    keys = ("x", "y", "U", "V", "T", "R", "t", "r", "theta")
    violations = dict.fromkeys(keys, 0)
    worst = dict.fromkeys(keys, 0.0)
    failures = []
    for s in range(samples):
        Z = rng.standard_normal((2, n, n)) + 1j * rng.standard_normal((2, n, n))
        Z *= eps / np.linalg.norm(Z)
        try:
            ratios = _sample_ratios(schur, sysL, pair, Z[0], Z[1])
        except GSPError as exc:
            failures.append((s, type(exc).__name__, str(exc)))
            continue
        for k, r in ratios.items():
            if r.size:
                violations[k] += int(np.count_nonzero(r > factor))
                worst[k] = max(worst[k], float(r.max()))
    return MonteCarloResult(eps=eps, samples=samples, seed=seed, factor=factor,
                            violations=violations, worst_ratio=worst, failures=failures)


# ------------------------------------------------------------------- sweeps

SWEEP_HEADER = ("eps", "bound", "exact", "ratio", "residual")
SWEEP_QUANTITIES = ("x", "y", "U", "V", "T", "R", "t", "r", "theta")


@dataclass
class SweepRow:
    eps: float
    bound: float
    exact: float
    ratio: float
    residual: float


def _select(quantity: str, n: int):
    q, _, arg = quantity.partition(":")
    if q not in SWEEP_QUANTITIES:
        raise ValueError(f"quantity must be one of {SWEEP_QUANTITIES} (theta takes ':p'), got {quantity!r}")
    p = int(arg) if arg else 1
    if q == "theta" and not (1 <= p <= n - 1):
        raise ValueError(f"theta:p needs 1 <= p <= {n - 1}")
    return q, p


def sweep_epsilon(problem: ProblemFile, eps_list, quantity: str = "x", order: str = "printed") -> list[SweepRow]:
    """Scale the problem's ``(dA, dB)`` to each ``||[dA; dB]||_F = eps`` and tabulate.

    ``bound`` and ``exact`` are 2-norms of the selected quantity (the angle
    itself for ``theta:p``); ``residual`` is ``||L [x; y] - [f; g]||_2`` with
    exact ``x, y`` and oracle ``f, g``, which is second order in ``eps``.  It is
    evaluated through :func:`gsp.linear_bounds.linearization_remainder` so
    that it stays accurate below ``eps = 1e-7``.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValueError("eps list must be nonempty and positive")
    pair = MatrixPair(problem.A, problem.B)
    n = pair.n
    q, p = _select(quantity, n)
    d0 = lb.stacked_norm(problem.dA, problem.dB)
    if d0 == 0:
        raise ValueError("the problem has no perturbation direction to scale")
    schur = generalized_schur(pair, order=resolve_order(problem, order))
    sysL = lb.build_L(schur.T, schur.R)
    rows = []
    for eps in eps_list:
        dA = problem.dA * (eps / d0)
        dB = problem.dB * (eps / d0)
        ex = exact_perturbations(pair, dA, dB, base=schur)
        xb, yb = lb.xy_linear_bounds(sysL, eps)
        W, K = lb.hat_WK(xb, yb, n)
        if q == "theta":
            bound = lb.invariant_subspace_bound(lb.build_Ltilde(sysL), p, eps).theta_lin
            exact = lb.exact_subspace_angle(ex.dK, p)
        else:
            Ub, Vb = lb.uv_bounds(schur.U, schur.V, W, K)
            Tb, Rb = lb.tr_bounds(schur.U, schur.V, schur.A, schur.B, dA, dB, W, K)
            tb, rb_ = lb.diagonal_bounds(lb.build_Z(schur.T, schur.R, sysL), eps)
            pick = {
                "x": (xb, ex.x), "y": (yb, ex.y), "U": (Ub, ex.dU), "V": (Vb, ex.dV),
                "T": (Tb, np.triu(ex.dT)), "R": (Rb, np.triu(ex.dR)),
                "t": (tb, np.diag(ex.dT)), "r": (rb_, np.diag(ex.dR)),
            }[q]
            bound = float(np.linalg.norm(pick[0]))
            exact = float(np.linalg.norm(pick[1]))
        rx, ry = lb.linearization_remainder(schur, ex.dU, ex.dV)
        residual = float(np.linalg.norm(np.concatenate([rx, ry])))
        ratio = exact / bound if bound > 0 else float("nan")
        rows.append(SweepRow(eps, float(bound), float(exact), float(ratio), residual))
    return rows


def emit_sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([repr(float(getattr(r, k))) for k in SWEEP_HEADER])
    return buf.getvalue()


def parse_sweep_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != SWEEP_HEADER:
        raise ValueError(f"unexpected header {header}")
    return [SweepRow(*(float(v) for v in row)) for row in reader if row]


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])

"""Ground-truth computations and experiments: dense LU solves, the
O(n^2) block Levinson recursion, the solution of the corresponding
infinite system, convergence and timing experiments.

Every fast path in this package is cross-checked against these oracles
in the test suite; nothing here is performance-critical except the
Levinson baseline, which exists precisely to be the O(n^2) comparison
point.
"""

import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import errors
from .blockarray import BlockMatrix, as_block_vector
from .coefficients import CoefficientTables
from .fast_solver import SolveReport, solve as fast_solve

DEFAULT_DENSE_CAP = 2048


def dense_cap():
    """Dense-path size ceiling; override with env TPZ_DENSE_CAP."""
    return int(os.environ.get("TPZ_DENSE_CAP", DEFAULT_DENSE_CAP))


def dense_toeplitz(spec, n, tables=None):
    """T_n(w) materialized from the autocovariance blocks gamma(s - t)."""
    if tables is None:
        tables = CoefficientTables(spec)
    d = spec.d
    band = np.stack([tables.gamma(k) for k in range(-(n - 1), n)])
    idx = np.arange(n)[:, None] - np.arange(n)[None, :] + (n - 1)
    data = band[idx].transpose(0, 2, 1, 3).reshape(n * d, n * d).copy()
    return BlockMatrix(n=n, d=d, data=data, hermitian=True)


def _check_cap(n):
    cap = dense_cap()
    if n > cap:
        raise ValueError(f"n = {n} exceeds the dense cap {cap} "
                         "(set TPZ_DENSE_CAP to raise it)")


def dense_solve(spec, n, y, tables=None):
    """LU solution of T_n(w) Z = Y; the reference everything else is
    measured against."""
    _check_cap(n)
    t0 = time.perf_counter()
    y = as_block_vector(y, spec.d)[:n]
    T = dense_toeplitz(spec, n, tables).data
    try:
        z = np.linalg.solve(T, y.reshape(n * spec.d, spec.d))
    except np.linalg.LinAlgError as exc:
        raise errors.NumericallySingular(str(exc)) from exc
    z = z.reshape(n, spec.d, spec.d)
    resid = float(np.linalg.norm(
        (T @ z.reshape(n * spec.d, spec.d)
         - y.reshape(n * spec.d, spec.d)).ravel()))
    return SolveReport(z=z, method="dense", n=n, d=spec.d,
                       seconds=time.perf_counter() - t0,
                       residual=resid, residual_is_approximate=False)


def dense_inverse(spec, n, tables=None):
    """T_n(w)^{-1} by dense LU."""
    _check_cap(n)
    T = dense_toeplitz(spec, n, tables)
    try:
        inv = np.linalg.inv(T.data)
    except np.linalg.LinAlgError as exc:
        raise errors.NumericallySingular(str(exc)) from exc
    return BlockMatrix(n=n, d=spec.d, data=inv, hermitian=True)


def levinson_solve(spec, n, y, tables=None):
    """Block Levinson recursion for T_n(w) Z = Y in O(n^2) block
    operations.

    Maintains the bordering solutions V_m = T_m^{-1} u_m and
    W_m = T_m^{-1} u~_m for the trailing / leading block columns
    (u_m stacks gamma(s - m - 1), u~_m stacks gamma(s)), growing the
    order one block row at a time. Positive definiteness of T_n keeps
    every Schur complement invertible; a singular one raises
    RecursionBreakdown.
    """
    t0 = time.perf_counter()
    y = as_block_vector(y, spec.d)[:n]
    if tables is None:
        tables = CoefficientTables(spec)
    d = spec.d
    gam = {k: tables.gamma(k) for k in range(-n, n + 1)}

    def solve_block(a, b):
        try:
            return np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise errors.RecursionBreakdown(str(exc)) from exc

    def dot(us, blocks):
        # sum_s u_s* blocks_s for (m, d, d) stacks
        return np.einsum("sba,sbc->ac", np.conj(us), blocks)

    g0 = gam[0]
    x = solve_block(g0, y[0])[None]
    v = solve_block(g0, gam[-1])[None]
    w = solve_block(g0, gam[1])[None]
    gneg = np.stack([gam[-k] for k in range(1, n + 1)])  # gamma(-k)
    gpos = np.stack([gam[k] for k in range(1, n + 1)])   # gamma(k)
    for m in range(1, n):
        u = gneg[:m][::-1]          # u_s = gamma(s - m - 1), s = 1..m
        ut = gpos[:m]               # u~_s = gamma(s)
        schur_end = g0 - dot(u, v)          # gamma(0) - u* V_m
        schur_front = g0 - dot(ut, w)       # gamma(0) - u~* W_m
        # grow the right-hand-side solution (append at the end)
        xi = solve_block(schur_end, y[m] - dot(u, x))
        x = np.concatenate([x - v @ xi, xi[None]])
        if m == n - 1:
            break
        # backward vector via the front bordering, forward via the end;
        # both updates consume this step's (not yet updated) V and W
        eta_v = solve_block(schur_front, gam[-m - 1] - dot(ut, v))
        eta_w = solve_block(schur_end, gam[m + 1] - dot(u, w))
        v_new = np.concatenate([eta_v[None], v - w @ eta_v])
        w_new = np.concatenate([w - v @ eta_w, eta_w[None]])
        v, w = v_new, w_new
    z = x
    return SolveReport(z=z, method="levinson", n=n, d=spec.d,
                       seconds=time.perf_counter() - t0,
                       residual=None, residual_is_approximate=True)


# -- infinite system and convergence ------------------------------------- #

def infinite_solution(spec, y_seq, horizon, tables=None, rel_tol=1e-14):
    """First `horizon` blocks of the solution to the one-sided infinite
    system: z_s = sum_{l=1}^{s} a~*_{s-l} g_l with
    g_l = sum_{j>=0} a~_j y_{l+j}.

    `y_seq` is a finite block stack, treated as zero beyond its length;
    it must be absolutely summable for the infinite system to make
    sense, which a finite stack trivially is.
    """
    if tables is None:
        tables = CoefficientTables(spec)
    y = as_block_vector(np.asarray(y_seq), spec.d)
    if not np.all(np.isfinite(y)):
        raise errors.NonSummableRHS("right-hand side contains non-finite "
                                    "blocks")
    ny = len(y)
    d = spec.d
    ymax = float(np.abs(y).max()) if ny else 0.0
    # a~ horizon: certified tail small against the y scale
    J = 0
    while tables.a_tail(J) > rel_tol * max(ymax, 1.0) and J < 100_000:
        J += max(1, J // 4)
    at = [tables.a_tilde(j) for j in range(max(J, horizon) + 1)]
    g = np.zeros((horizon + 1, d, d), dtype=np.complex128)
    for l in range(1, horizon + 1):
        acc = np.zeros((d, d), dtype=np.complex128)
        for j in range(0, min(J + 1, ny - l + 1)):
            acc += at[j] @ y[l + j - 1]
        g[l] = acc
    z = np.zeros((horizon, d, d), dtype=np.complex128)
    for s in range(1, horizon + 1):
        acc = np.zeros((d, d), dtype=np.complex128)
        for l in range(1, s + 1):
            acc += at[s - l].conj().T @ g[l]
        z[s - 1] = acc
    return z


@dataclass
class ConvergenceReport:
    """l1 block deviation between the order-n solution and the infinite
    one, per n."""

    ns: list
    deltas: list
    y_decay: str = ""

    def rows(self):
        return list(zip(self.ns, self.deltas))


def convergence_experiment(spec, y_seq, ns, tables=None, method="auto"):
    """For each n, solve the order-n system against the first n blocks
    of y and report sum_k ||z_{n,k} - z_k|| versus the infinite
    solution."""
    if tables is None:
        tables = CoefficientTables(spec)
    y = as_block_vector(np.asarray(y_seq), spec.d)
    n_max = max(ns)
    z_inf = infinite_solution(spec, y, n_max, tables)
    deltas = []
    for n in ns:
        if len(y) < n:
            raise ValueError("y_seq shorter than requested order")
        if method == "fast" or (method == "auto" and n >= 2 * spec.m0 + 1):
            rep = fast_solve(spec, n, y[:n], tables=tables,
                             compute_residual=False)
        else:
            rep = dense_solve(spec, n, y[:n], tables=tables)
        diff = rep.z - z_inf[:n]
        deltas.append(float(sum(np.linalg.norm(b, 2) for b in diff)))
    return ConvergenceReport(ns=list(ns), deltas=deltas)


# -- benchmark ------------------------------------------------------------- #

@dataclass
class BenchRow:
    method: str
    n: int
    d: int
    K: int
    m0: int
    median_seconds: float = None
    residual: float = None
    skipped: bool = False


@dataclass
class BenchTable:
    rows: list = field(default_factory=list)

    def csv_lines(self):
        out = ["method,n,d,K,m0,median_seconds,residual"]
        for r in self.rows:
            if r.skipped:
                out.append(f"{r.method},{r.n},{r.d},{r.K},{r.m0},,skipped")
            else:
                res = "" if r.residual is None else f"{r.residual:.6e}"
                out.append(f"{r.method},{r.n},{r.d},{r.K},{r.m0},"
                           f"{r.median_seconds:.6e},{res}")
        return out


def bench(spec, ns, methods=("fast", "levinson", "dense"), repeats=5,
          rng=None, tables=None):
    """Median wall-clock per (method, n) plus a residual per run; the
    dense and levinson rows above the dense cap are marked skipped."""
    if rng is None:
        rng = np.random.default_rng(0)
    if tables is None:
        tables = CoefficientTables(spec)
    table = BenchTable()
    solvers = {
        "fast": lambda n, y: fast_solve(spec, n, y, tables=tables),
        "dense": lambda n, y: dense_solve(spec, n, y, tables=tables),
        "levinson": lambda n, y: levinson_solve(spec, n, y, tables=tables),
    }
    for n in ns:
        y = (rng.standard_normal((n, spec.d, spec.d))
             + 1j * rng.standard_normal((n, spec.d, spec.d)))
        for method in methods:
            row = BenchRow(method=method, n=n, d=spec.d, K=spec.K,
                           m0=spec.m0)
            if method in ("dense", "levinson") and n > dense_cap():
                row.skipped = True
                table.rows.append(row)
                continue
            times = []
            rep = None
            for _ in range(repeats):
                t0 = time.perf_counter()
                rep = solvers[method](n, y)
                times.append(time.perf_counter() - t0)
            row.median_seconds = float(np.median(times))
            row.residual = rep.residual
            table.rows.append(row)
    return table


def yule_walker_rhs(spec, n, tables=None):
    """The right-hand side (gamma(1), ..., gamma(n))* of the classical
    predictor equation attached to this symbol (a test fixture: for the
    reversed symbol the solve output stacks the finite predictor
    coefficients)."""
    if tables is None:
        tables = CoefficientTables(spec)
    return np.stack([tables.gamma(k).conj().T for k in range(1, n + 1)])

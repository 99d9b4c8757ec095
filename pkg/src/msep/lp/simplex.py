"""Reference LP solver: bounded-variable revised simplex.

Self-contained simplex adequate at desk scale, used where vertex solutions
and exact dual conventions must be auditable (the external backend is the
default for large solves). Design:

- equality standard form with lower/upper bounds, minimization;
- equilibration scaling (powers of two, so coefficients stay exact);
- triangular crash basis: columns absorbed while they are singletons over
  the still-uncovered rows, which covers inventory/conversion chains, not
  just slack columns; artificial columns with unit phase-1 cost for the
  rows left over;
- deterministic outward bound perturbation against degenerate stalling,
  removed before reporting (the final basis is optimal for the true
  bounds because reduced-cost signs do not depend on bound values);
- ratio test takes the largest pivot among the minimal-ratio rows; when
  none of those pivots is trustworthy it falls back to a relaxed window
  (rows whose bound may be crossed within its feasibility slack), and a
  column that is numerically null on every blocking row is shelved rather
  than pivoted on;
- basis kept as a sparse LU factorization (scipy splu) plus an eta file
  (sparse-stored when worthwhile), refactorized periodically; pivots below
  a floor are recomputed from a fresh factorization before being trusted,
  and a basis that still loses rank restarts the whole solve with a
  shorter eta chain rather than failing;
- Dantzig pricing with first-index tie-breaks; Bland's rule after a
  degeneracy streak, released once the objective moves again;
- two-phase: phase 1 minimizes total artificial activity, phase 2 the
  true cost with artificials fixed to zero.

Deterministic for a fixed problem and warm start.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from msep.lp.problem import LpProblem, LpSolution, LpStatus, SolverTolerances

AT_LOWER, AT_UPPER, BASIC, FREE = 0, 1, 2, 3

# pivots below this through a non-empty eta chain are recomputed from a
# fresh factorization before being trusted; accepted tiny pivots force an
# immediate refactorization so 1/pivot error cannot ride the eta file
PIVOT_FLOOR = 1e-7


class _SingularBasis(Exception):
    """The factorized basis lost rank; the solve restarts from the current point."""


@dataclass
class SimplexBasis:
    """Warm-start handle: basic column indices plus nonbasic rest states."""

    basis: np.ndarray  # shape (m,), column indices (structural columns only)
    state: np.ndarray  # shape (n,), AT_LOWER / AT_UPPER / BASIC / FREE


def solve_simplex(
    problem: LpProblem,
    tolerances: SolverTolerances | None = None,
    warm_start: SimplexBasis | np.ndarray | None = None,
    max_iterations: int | None = None,
) -> LpSolution:
    tol = tolerances or SolverTolerances()
    problem.validate()
    if problem.n_rows == 0:
        return _solve_boxed(problem)
    result, clean = _attempt(problem, tol, max_iterations, warm_start, perturb=True)
    if result is not None and result.status is LpStatus.OPTIMAL and not clean:
        # rare: removing the anti-degeneracy perturbation drifted a basic
        # value past tolerance; redo the solve on the exact bounds
        result, _ = _attempt(problem, tol, max_iterations, warm_start, perturb=False)
    if result is None:
        result = LpSolution(status=LpStatus.NUMERICAL, objective=float("nan"))
    return result


def _attempt(
    problem: LpProblem,
    tol: SolverTolerances,
    max_iterations: int | None,
    warm_start,
    perturb: bool,
) -> tuple[LpSolution | None, bool]:
    """One solve, retried with shorter eta chains if the basis loses rank."""
    for refactor_every in (64, 16, 4):
        core = _Simplex(problem, tol, max_iterations, perturb=perturb)
        core.refactor_every = refactor_every
        try:
            return core.solve(warm_start), core.restore_clean
        except _SingularBasis:
            continue
    return None, True


def _solve_boxed(problem: LpProblem) -> LpSolution:
    """No rows: optimum sits at the cost-favoring bound of each variable."""
    c, lo, up = problem.cost, problem.lower, problem.upper
    x = np.where(c > 0, lo, np.where(c < 0, up, np.clip(0.0, lo, up)))
    if not np.all(np.isfinite(x)):
        return LpSolution(status=LpStatus.UNBOUNDED, objective=-np.inf)
    return LpSolution(
        status=LpStatus.OPTIMAL,
        objective=float(c @ x),
        x=np.asarray(x, dtype=float),
        duals=np.zeros(0),
        reduced_costs=c.copy(),
    )


class _Simplex:
    def __init__(self, problem: LpProblem, tol: SolverTolerances, max_iterations: int | None,
                 perturb: bool = False):
        self.problem = problem
        self.tol = tol
        m, n = problem.a_eq.shape
        self.m, self.n = m, n
        self.max_iterations = max_iterations or (50 * (m + n) + 10_000)

        # equilibration with power-of-two scales keeps coefficients exact
        a = problem.a_eq.tocsr().astype(float)
        row_max = np.maximum.reduce(np.abs(a).toarray(), axis=1) if m * n <= 40_000 \
            else np.asarray(abs(a).max(axis=1).todense()).ravel()
        self.row_scale = _pow2_inverse(row_max)
        a = sp.diags(self.row_scale) @ a
        col_max = np.asarray(abs(a).max(axis=0).todense()).ravel()
        self.col_scale = _pow2_inverse(col_max)
        a = a @ sp.diags(self.col_scale)

        # artificial column per row, sign fixed after the crash start
        self.art_sign = np.ones(m)
        art = sp.diags(self.art_sign).tocsc()
        self.a_ext = sp.hstack([a.tocsc(), art], format="csc")
        self.a_t = self.a_ext.T  # csr view sharing data; sees sign fixes
        self.b = problem.b_eq * self.row_scale
        self.cost = np.concatenate([problem.cost * self.col_scale, np.zeros(m)])
        self.lower = np.concatenate([problem.lower / self.col_scale, np.zeros(m)])
        self.upper = np.concatenate([problem.upper / self.col_scale, np.zeros(m)])

        # outward bound relaxation so degenerate vertices stop producing
        # zero-length steps; removed in finish(). Deterministic jitter keeps
        # repeated runs identical.
        self.perturb = perturb
        self.restore_clean = True
        if perturb:
            self.true_lower = self.lower.copy()
            self.true_upper = self.upper.copy()
            jitter = 1.0 + ((np.arange(n) * 2654435761) % 4096) / 4096.0
            movable = self.lower[:n] < self.upper[:n]
            grow = 1e-9 * jitter
            lo, up = self.lower[:n], self.upper[:n]
            lo_pert = np.where(movable & np.isfinite(lo), grow * (1.0 + np.abs(lo)), 0.0)
            up_pert = np.where(movable & np.isfinite(up), grow * (1.0 + np.abs(up)), 0.0)
            self.lower[:n] = lo - lo_pert
            self.upper[:n] = up + up_pert

        self.x = np.zeros(n + m)
        self.state = np.full(n + m, AT_LOWER, dtype=np.int8)
        self.basis = np.zeros(m, dtype=np.int64)
        self.lu = None
        self.etas: list[tuple[int, np.ndarray | None, np.ndarray, float]] = []
        self.refactor_every = 64
        self.iterations = 0
        self.bland = False
        self.degen_streak = 0
        self.banned = np.zeros(n + m, dtype=bool)

    # -- basis linear algebra ------------------------------------------------

    def factorize(self) -> bool:
        try:
            self.lu = splu(self.a_ext[:, self.basis].tocsc())
        except RuntimeError:
            return False
        self.etas = []
        return True

    def push_eta(self, r: int, d: np.ndarray) -> None:
        nz = np.flatnonzero(np.abs(d) > 1e-14)
        if nz.size * 4 < self.m:
            self.etas.append((r, nz, d[nz], float(d[r])))
        else:
            self.etas.append((r, None, d, float(d[r])))

    def ftran(self, rhs: np.ndarray) -> np.ndarray:
        z = self.lu.solve(rhs)
        for r, idx, vals, dr in self.etas:
            zr = z[r] / dr
            if zr != 0.0:
                if idx is None:
                    z -= vals * zr
                else:
                    z[idx] -= vals * zr
                z[r] = zr
        return z

    def btran(self, rhs: np.ndarray) -> np.ndarray:
        v = rhs.copy()
        for r, idx, vals, dr in reversed(self.etas):
            dot = vals @ v if idx is None else vals @ v[idx]
            v[r] = (v[r] - (dot - dr * v[r])) / dr
        return self.lu.solve(v, trans="T")

    def recompute_basics(self) -> None:
        x_nb = self.x.copy()
        x_nb[self.basis] = 0.0
        self.x[self.basis] = self.ftran(self.b - self.a_ext @ x_nb)

    # -- start ---------------------------------------------------------------

    def crash_start(self, hint: np.ndarray | None) -> None:
        """Nonbasic at nearest bound (or hint), triangular cover of rows.

        Columns are absorbed while they have exactly one entry in a
        still-uncovered row, so the cover picks up not just slack columns
        but the inventory/conversion chains behind them. Greedy values are
        only a bound heuristic; exact basics come from recompute_basics and
        get repaired afterwards.
        """
        n = self.n
        for j in range(n + self.m):
            lo, up = self.lower[j], self.upper[j]
            if np.isfinite(lo) and np.isfinite(up):
                self.x[j], self.state[j] = (lo, AT_LOWER) if abs(lo) <= abs(up) else (up, AT_UPPER)
            elif np.isfinite(lo):
                self.x[j], self.state[j] = lo, AT_LOWER
            elif np.isfinite(up):
                self.x[j], self.state[j] = up, AT_UPPER
            else:
                self.x[j], self.state[j] = 0.0, FREE
        if hint is not None:
            scaled = np.clip(hint / self.col_scale, self.lower[:n], self.upper[:n])
            finite = np.isfinite(scaled)
            self.x[:n][finite] = scaled[finite]

        residual = self.b - self.a_ext[:, :n] @ self.x[:n]
        covered = np.zeros(self.m, dtype=bool)
        indptr, indices, data = self.a_ext.indptr, self.a_ext.indices, self.a_ext.data
        live = np.diff(indptr[: n + 1]).astype(np.int64)  # entries in uncovered rows
        from collections import deque

        queue = deque(int(j) for j in np.flatnonzero(live == 1))
        row_cols = self.problem.a_eq.tocsr()
        while queue:
            j = queue.popleft()
            if live[j] != 1 or self.state[j] == BASIC:
                continue
            sl = slice(indptr[j], indptr[j + 1])
            rows_j, coefs_j = indices[sl], data[sl]
            open_pos = np.flatnonzero(~covered[rows_j])
            if open_pos.size != 1:
                continue
            r = int(rows_j[open_pos[0]])
            coef = float(coefs_j[open_pos[0]])
            if abs(coef) < 1e-10:
                continue
            value = self.x[j] + residual[r] / coef
            if not (self.lower[j] - 1e-12 <= value <= self.upper[j] + 1e-12):
                continue
            delta = np.clip(value, self.lower[j], self.upper[j]) - self.x[j]
            self.x[j] += delta
            self.state[j] = BASIC
            self.basis[r] = j
            covered[r] = True
            open_rows = rows_j[~covered[rows_j]]
            residual[open_rows] -= coefs_j[~covered[rows_j]] * delta
            residual[r] = 0.0
            for jj in row_cols.indices[row_cols.indptr[r]: row_cols.indptr[r + 1]]:
                live[jj] -= 1
                if live[jj] == 1 and self.state[jj] != BASIC:
                    queue.append(int(jj))
        for row in np.flatnonzero(~covered):
            self.install_artificial(int(row), 1.0 if residual[row] >= 0 else -1.0,
                                    abs(float(residual[row])))

    def install_artificial(self, row: int, sign: float, value: float) -> None:
        j = self.n + row
        self.art_sign[row] = sign
        self.a_ext.data[self.a_ext.indptr[j]] = sign
        self.upper[j] = np.inf
        self.x[j] = value
        self.state[j] = BASIC
        self.basis[row] = j

    def repair_crash_bounds(self) -> bool:
        """Swap artificials in for crash basics that violate their bounds."""
        for _ in range(4):
            if not self.factorize():
                break
            self.recompute_basics()
            # an artificial solved to a negative value means its sign guess
            # was wrong; flipping the column sign flips the solved value
            art_rows = np.flatnonzero(self.basis >= self.n)
            flipped = False
            for r in art_rows:
                if self.x[self.basis[r]] < 0.0:
                    j = int(self.basis[r])
                    self.art_sign[r] = -self.art_sign[r]
                    self.a_ext.data[self.a_ext.indptr[j]] *= -1.0
                    flipped = True
            if flipped:
                if not self.factorize():
                    break
                self.recompute_basics()
            xb = self.x[self.basis]
            ftol = self.tol.feasibility * (1.0 + np.abs(xb))
            viol = np.flatnonzero(
                (xb < self.lower[self.basis] - ftol) | (xb > self.upper[self.basis] + ftol))
            viol = [int(r) for r in viol if self.basis[r] < self.n]
            if not viol:
                return True
            for r in viol:
                j = int(self.basis[r])
                lo, up = self.lower[j], self.upper[j]
                if np.isfinite(lo) and (not np.isfinite(up)
                                        or abs(self.x[j] - lo) <= abs(self.x[j] - up)):
                    self.x[j], self.state[j] = lo, AT_LOWER
                elif np.isfinite(up):
                    self.x[j], self.state[j] = up, AT_UPPER
                else:
                    self.x[j], self.state[j] = 0.0, FREE
                self.install_artificial(r, 1.0, 0.0)
        # cover refuses to settle: the all-artificial start always works
        for r in range(self.m):
            j = self.basis[r]
            if j < self.n:
                lo, up = self.lower[j], self.upper[j]
                if np.isfinite(lo) and (not np.isfinite(up) or abs(lo) <= abs(up)):
                    self.x[j], self.state[j] = lo, AT_LOWER
                elif np.isfinite(up):
                    self.x[j], self.state[j] = up, AT_UPPER
                else:
                    self.x[j], self.state[j] = 0.0, FREE
        residual = self.b - self.a_ext[:, : self.n] @ self.x[: self.n]
        for r in range(self.m):
            self.install_artificial(r, 1.0 if residual[r] >= 0 else -1.0,
                                    abs(float(residual[r])))
        return self.factorize()

    def try_warm_basis(self, warm: SimplexBasis) -> bool:
        if len(warm.basis) != self.m or len(warm.state) != self.n:
            return False
        self.basis = warm.basis.astype(np.int64).copy()
        if np.any(self.basis < 0) or np.any(self.basis >= self.n):
            return False
        self.state[: self.n] = warm.state
        self.state[self.n:] = AT_LOWER
        n_idx = np.arange(self.n)
        at_lo = n_idx[self.state[: self.n] == AT_LOWER]
        at_up = n_idx[self.state[: self.n] == AT_UPPER]
        self.x[:] = 0.0
        self.x[at_lo] = self.lower[at_lo]
        self.x[at_up] = self.upper[at_up]
        if not np.all(np.isfinite(self.x)):
            return False
        if not self.factorize():
            return False
        self.recompute_basics()
        xb = self.x[self.basis]
        drift = max(
            float(np.max(self.lower[self.basis] - xb, initial=0.0)),
            float(np.max(xb - self.upper[self.basis], initial=0.0)),
        )
        return drift <= self.tol.feasibility * (1.0 + float(np.max(np.abs(xb), initial=0.0)))

    # -- simplex core ----------------------------------------------------------

    def iterate(self, cost: np.ndarray) -> LpStatus:
        """Run pivots for the given cost vector until optimal or halted."""
        # dual-feasibility slack per column: its own cost magnitude plus the
        # dual scale, so a handful of huge-cost columns (penalty terms) cannot
        # mask small but genuine reduced costs elsewhere
        tol_base = self.tol.optimality * (1.0 + np.abs(cost))
        zp = self.tol.zero_pivot
        repairs = 0
        self.banned[:] = self.lower >= self.upper  # no room to move
        while True:
            if self.iterations >= self.max_iterations:
                return LpStatus.ITERATION_LIMIT
            if len(self.etas) >= self.refactor_every:
                if not self.factorize():
                    raise _SingularBasis
                self.recompute_basics()

            y = self.btran(cost[self.basis])
            rc = cost - self.a_t @ y
            # the dual-scale term only absorbs arithmetic error in a^T y,
            # which grows like eps * |y|; anything larger masks genuine
            # reduced costs on badly scaled problems
            tol_d = tol_base + 1e-12 * float(np.max(np.abs(y), initial=0.0))
            state = self.state
            eligible = (
                ((state == AT_LOWER) & (rc < -tol_d))
                | ((state == AT_UPPER) & (rc > tol_d))
                | ((state == FREE) & (np.abs(rc) > tol_d))
            ) & ~self.banned
            if not np.any(eligible):
                # confirm on a fresh factorization before declaring optimality
                if self.etas and repairs < 3:
                    repairs += 1
                    if not self.factorize():
                        raise _SingularBasis
                    self.recompute_basics()
                    continue
                return LpStatus.OPTIMAL

            if self.bland:
                j = int(np.flatnonzero(eligible)[0])
            else:
                score = np.where(eligible, np.abs(rc), 0.0)
                j = int(np.argmax(score))
            dirsign = 1.0 if (state[j] == AT_LOWER or (state[j] == FREE and rc[j] < 0)) else -1.0

            col = np.zeros(self.m)
            sl = slice(self.a_ext.indptr[j], self.a_ext.indptr[j + 1])
            col[self.a_ext.indices[sl]] = self.a_ext.data[sl]
            d = self.ftran(col)
            delta = -dirsign * d

            xb = self.x[self.basis]
            lo_b = self.lower[self.basis]
            up_b = self.upper[self.basis]
            room = np.full(self.m, np.inf)
            inc = delta > zp
            dec = delta < -zp
            room[inc] = np.maximum(up_b[inc] - xb[inc], 0.0) / delta[inc]
            room[dec] = np.maximum(xb[dec] - lo_b[dec], 0.0) / (-delta[dec])
            t_basic = float(np.min(room, initial=np.inf))
            t_flip = self.upper[j] - self.lower[j]
            step = min(t_basic, t_flip)
            if not np.isfinite(step):
                return LpStatus.UNBOUNDED

            self.iterations += 1
            if step <= 1e-11 * (1.0 + float(np.max(np.abs(xb), initial=0.0))):
                self.degen_streak += 1
                if self.degen_streak > max(200, self.m):
                    self.bland = True
            else:
                self.degen_streak = 0
                self.bland = False

            if t_flip <= t_basic:
                self.x[j] = self.upper[j] if dirsign > 0 else self.lower[j]
                self.state[j] = AT_UPPER if dirsign > 0 else AT_LOWER
                self.x[self.basis] = xb + delta * step
                continue

            in_window = room <= t_basic * (1.0 + 1e-9) + 1e-13
            if self.bland:
                rows = np.flatnonzero(in_window)
                r = int(rows[np.argmin(self.basis[rows])])
            else:
                stability = np.where(in_window, np.abs(delta), 0.0)
                r = int(np.argmax(stability))
            if abs(d[r]) < PIVOT_FLOOR:
                # no trustworthy pivot at the minimal ratio: admit rows whose
                # bound may be crossed within its feasibility slack and take
                # the most stable pivot among them
                slack_b = self.tol.feasibility * (1.0 + np.abs(xb))
                relaxed = np.full(self.m, np.inf)
                relaxed[inc] = room[inc] + slack_b[inc] / delta[inc]
                relaxed[dec] = room[dec] + slack_b[dec] / (-delta[dec])
                theta = min(float(np.min(relaxed, initial=np.inf)), t_flip)
                cand = (room <= theta) & (np.abs(delta) >= PIVOT_FLOOR)
                if np.any(cand):
                    if self.bland:
                        rows = np.flatnonzero(cand)
                        r = int(rows[np.argmin(self.basis[rows])])
                    else:
                        r = int(np.argmax(np.where(cand, np.abs(delta), 0.0)))
                    if t_flip <= room[r]:
                        self.x[j] = self.upper[j] if dirsign > 0 else self.lower[j]
                        self.state[j] = AT_UPPER if dirsign > 0 else AT_LOWER
                        self.x[self.basis] = xb + delta * t_flip
                        continue
                    step = room[r]
                elif self.etas:
                    # the column may just be corrupted by the eta chain:
                    # recompute it through a fresh factorization
                    if not self.factorize():
                        raise _SingularBasis
                    self.recompute_basics()
                    continue
                else:
                    # numerically null on every row it could pivot on; any
                    # pivot here collapses the basis, so shelve the column
                    self.banned[j] = True
                    continue
            leaving = self.basis[r]
            self.x[self.basis] = xb + delta * step
            self.x[j] += dirsign * step
            self.x[leaving] = self.upper[leaving] if delta[r] > 0 else self.lower[leaving]
            self.state[leaving] = AT_UPPER if delta[r] > 0 else AT_LOWER
            self.basis[r] = j
            self.state[j] = BASIC
            self.push_eta(r, d)

    def solve(self, warm_start) -> LpSolution:
        warm_ok = False
        if isinstance(warm_start, SimplexBasis):
            warm_ok = self.try_warm_basis(warm_start)
        if not warm_ok:
            hint = warm_start if isinstance(warm_start, np.ndarray) else None
            self.crash_start(hint)
            if not self.repair_crash_bounds():
                return LpSolution(status=LpStatus.NUMERICAL, objective=float("nan"))

            art_active = np.any(self.x[self.n:] > 0) or np.any(self.basis >= self.n)
            if art_active:
                phase1_cost = np.concatenate([np.zeros(self.n), np.ones(self.m)])
                status = self.iterate(phase1_cost)
                if status is not LpStatus.OPTIMAL:
                    return LpSolution(status=status if status is not LpStatus.UNBOUNDED
                                      else LpStatus.NUMERICAL,
                                      objective=float("nan"), iterations=self.iterations)
                infeas = float(np.sum(self.x[self.n:]))
                if infeas > self.tol.feasibility * (1.0 + float(np.max(np.abs(self.b), initial=0.0))):
                    rows = tuple(int(i) for i in np.flatnonzero(
                        self.x[self.n:] > self.tol.feasibility))
                    return LpSolution(status=LpStatus.INFEASIBLE, objective=float("nan"),
                                      iterations=self.iterations, infeasible_rows=rows)
            # artificials are pinned at zero for phase 2
            self.upper[self.n:] = 0.0
            self.x[self.n:] = 0.0
            self.bland = False
            self.degen_streak = 0

        status = self.iterate(self.cost)
        if status is not LpStatus.OPTIMAL:
            return LpSolution(status=status, objective=float("nan"), iterations=self.iterations)
        return self.finish()

    def finish(self) -> LpSolution:
        n = self.n
        if self.perturb:
            # snap back to the exact bounds; the basis stays optimal because
            # reduced-cost sign tests never looked at bound values
            self.lower = self.true_lower
            self.upper = self.true_upper
            at_lo = self.state == AT_LOWER
            at_up = self.state == AT_UPPER
            self.x[at_lo] = self.lower[at_lo]
            self.x[at_up] = self.upper[at_up]
            self.recompute_basics()
            xb = self.x[self.basis]
            drift = max(
                float(np.max(self.lower[self.basis] - xb, initial=0.0)),
                float(np.max(xb - self.upper[self.basis], initial=0.0)),
            )
            self.restore_clean = drift <= self.tol.feasibility * (
                1.0 + float(np.max(np.abs(xb), initial=0.0)))
        y = self.btran(self.cost[self.basis])
        rc = self.cost - self.a_ext.T @ y
        # a basic artificial pinned at zero is harmless for the primal but
        # would poison a warm restart; swap each for a dual-degenerate
        # structural column (degenerate pivot, x and duals unchanged)
        art_rows = np.flatnonzero(self.basis >= n)
        if art_rows.size and art_rows.size <= 25:
            tol_rc = self.tol.optimality * (1.0 + np.abs(self.cost[:n]))
            swapped = False
            for r in art_rows:
                e = np.zeros(self.m)
                e[int(r)] = 1.0
                alpha = (self.a_t @ self.btran(e))[:n]
                cand = (
                    (np.abs(alpha) >= PIVOT_FLOOR)
                    & (self.state[:n] != BASIC)
                    & (np.abs(rc[:n]) <= tol_rc)
                )
                if not np.any(cand):
                    continue
                j = int(np.argmax(np.where(cand, np.abs(alpha), 0.0)))
                col = np.zeros(self.m)
                sl = slice(self.a_ext.indptr[j], self.a_ext.indptr[j + 1])
                col[self.a_ext.indices[sl]] = self.a_ext.data[sl]
                d = self.ftran(col)
                old = int(self.basis[r])
                self.basis[r] = j
                self.state[j] = BASIC
                self.state[old] = AT_LOWER
                self.x[old] = 0.0
                self.push_eta(int(r), d)
                swapped = True
            if swapped:
                y = self.btran(self.cost[self.basis])
                rc = self.cost - self.a_ext.T @ y
        x = self.x[:n] * self.col_scale
        duals = y * self.row_scale
        reduced = rc[:n] / self.col_scale
        basis_out = SimplexBasis(
            basis=self.basis.copy(),
            state=self.state[:n].copy(),
        )
        if np.any(basis_out.basis >= n):
            basis_out = None
        return LpSolution(
            status=LpStatus.OPTIMAL,
            objective=float(self.problem.cost @ x),
            x=x,
            duals=duals,
            reduced_costs=reduced,
            iterations=self.iterations,
            basis=basis_out,
        )


def _pow2_inverse(maxima: np.ndarray) -> np.ndarray:
    """1/max rounded to the nearest power of two; zero maxima scale by 1."""
    safe = np.where(maxima > 0, maxima, 1.0)
    return np.exp2(-np.round(np.log2(safe)))

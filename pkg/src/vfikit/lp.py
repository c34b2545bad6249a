"""Dense two-phase simplex for standard-form linear programs.

    minimize  c @ g   subject to  A @ g = b,  g >= 0

Problems from the controller are small and dense (a few dozen rows and
columns), so a plain tableau is used. Entering columns follow the largest
reduced cost (Dantzig) and switch to Bland's rule after ``50 * M`` pivots,
which guarantees termination on degenerate problems.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "CanonicalLP", "LPSolution",
    "LPDimensionError", "LPNumericalError", "solve", "pseudoinverse_step",
    "dump_lp", "load_lp",
]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

FEAS_TOL = 1e-9
OPT_TOL = 1e-10
PIVOT_TOL = 1e-9


class LPDimensionError(ValueError):
    pass


class LPNumericalError(ArithmeticError):
    """Simplex breakdown; ``condition`` is the 2-norm condition number of the last basis."""

    def __init__(self, message: str, condition: float = float("nan")):
        super().__init__(f"{message} (basis condition number {condition:.3g})")
        self.condition = condition


@dataclass(frozen=True)
class CanonicalLP:
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.size, c.size):
            raise LPDimensionError(f"A is {A.shape}, expected ({b.size}, {c.size})")
        if self.names and len(self.names) != c.size:
            raise LPDimensionError("one name per decision variable required")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape


@dataclass(frozen=True)
class LPSolution:
    g: np.ndarray
    objective: float
    status: str
    basis: tuple = ()
    pivots: int = 0
    duals: np.ndarray = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, j: int, d: np.ndarray) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        d -= d[j] * T[r, :-1]
        d[j] = 0.0
        self.basis[r] = j
        self.pivots += 1

    def condition(self, A: np.ndarray) -> float:
        cols = [j for j in self.basis if j < A.shape[1]]
        if not cols:
            return 1.0
        return float(np.linalg.cond(A[:, cols]))


def _run(tab: _Tableau, d: np.ndarray, allowed: int, bland_after: int, max_pivots: int) -> str:
    """Iterate to optimality over columns ``< allowed``; returns a status."""
    T = tab.T
    while True:
        red = d[:allowed]
        if tab.pivots >= bland_after:
            cand = np.flatnonzero(red < -OPT_TOL)
            if cand.size == 0:
                return OPTIMAL
            j = int(cand[0])
            bland = True
        else:
            j = int(np.argmin(red))
            if red[j] >= -OPT_TOL:
                return OPTIMAL
            bland = False
        a = T[:, j]
        rows = np.flatnonzero(a > PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED
        ratios = np.maximum(T[rows, -1], 0.0) / a[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + best)]
        if bland:
            r = int(min(ties, key=lambda i: tab.basis[i]))
        else:
            r = int(ties[np.argmax(a[ties])])
        tab.pivot(r, j, d)
        if tab.pivots > max_pivots:
            raise LPNumericalError(f"pivot limit {max_pivots} exceeded")


def solve(lp: CanonicalLP, max_pivots: int | None = None) -> LPSolution:
    """Solve ``lp``; the result is a basic solution or an infeasible/unbounded status."""
    A0, b0, c0 = lp.A, lp.b, lp.c
    K, M = A0.shape
    bland_after = 50 * max(M, 1)
    if max_pivots is None:
        max_pivots = bland_after + 200 * (M + K) + 1000
    b_scale = 1.0 + (float(np.abs(b0).max()) if K else 0.0)

    A = A0.copy()
    b = b0.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # crash basis: columns that are positive unit vectors up to scaling
    basis = [-1] * K
    nz = A != 0.0
    singletons = np.flatnonzero(nz.sum(axis=0) == 1)
    for j in singletons:
        r = int(np.argmax(nz[:, j]))
        if basis[r] < 0 and A[r, j] > 0.0:
            basis[r] = int(j)
    missing = [r for r in range(K) if basis[r] < 0]
    n_art = len(missing)
    T = np.zeros((K, M + n_art + 1))
    T[:, :M] = A
    T[:, -1] = b
    for k, r in enumerate(missing):
        T[r, M + k] = 1.0
        basis[r] = M + k
    for r in range(K):
        j = basis[r]
        if j < M:
            T[r] /= T[r, j]
    tab = _Tableau(T, basis)

    # phase 1
    if n_art:
        d1 = np.zeros(M + n_art)
        d1[M:] = 1.0
        for r in missing:
            d1 -= T[r, :-1]
        _run(tab, d1, M + n_art, bland_after, max_pivots)
        infeas = float(sum(T[r, -1] for r in range(K) if tab.basis[r] >= M))
        if infeas > FEAS_TOL * b_scale:
            return LPSolution(np.zeros(M), float("nan"), INFEASIBLE, pivots=tab.pivots)
        keep = []
        dummy = np.zeros(M + n_art)
        for r in range(K):
            if tab.basis[r] < M:
                keep.append(r)
                continue
            row = np.abs(T[r, :M])
            j = int(np.argmax(row)) if M else 0
            if M and row[j] > PIVOT_TOL:
                tab.pivot(r, j, dummy)
                keep.append(r)
            # otherwise the row is redundant and dropped
        pivots1 = tab.pivots
        T = np.hstack([T[keep, :M], T[keep, -1:]])
        tab = _Tableau(T, [tab.basis[r] for r in keep])
    else:
        T = np.hstack([T[:, :M], T[:, -1:]])
        tab = _Tableau(T, basis)
        pivots1 = 0

    # phase 2
    d = c0.copy()
    for r, j in enumerate(tab.basis):
        d -= c0[j] * tab.T[r, :-1]
    status = _run(tab, d, M, bland_after, max_pivots)
    if status == UNBOUNDED:
        return LPSolution(np.zeros(M), -float("inf"), UNBOUNDED, tuple(tab.basis), tab.pivots + pivots1)

    g = np.zeros(M)
    g[tab.basis] = tab.T[:, -1]
    resid = float(np.abs(A0 @ g - b0).max()) if K else 0.0
    if resid > 1e-8 * b_scale or g.min(initial=0.0) < -1e-10:
        # recompute the basic solution from the original data
        B = A0[:, tab.basis]
        xb, *_ = np.linalg.lstsq(B, b0, rcond=None)
        g = np.zeros(M)
        g[tab.basis] = xb
        resid = float(np.abs(A0 @ g - b0).max())
        if resid > 1e-8 * b_scale or g.min(initial=0.0) < -1e-9:
            raise LPNumericalError(f"basic solution residual {resid:.3g}", tab.condition(A0))
    g = np.maximum(g, 0.0)
    B = A0[:, tab.basis]
    duals, *_ = np.linalg.lstsq(B.T, c0[tab.basis], rcond=None)
    return LPSolution(g, float(c0 @ g), OPTIMAL, tuple(int(j) for j in tab.basis),
                      tab.pivots + pivots1, duals)


def pseudoinverse_step(J, rhs) -> np.ndarray:
    """Minimum-norm least-squares solution ``pinv(J) @ rhs`` (SVD based)."""
    return np.linalg.pinv(np.atleast_2d(np.asarray(J, dtype=float))) @ np.asarray(rhs, dtype=float)


def dump_lp(lp: CanonicalLP, path) -> None:
    """Write ``c``, ``A`` and ``b`` as plain-text matrices for cross-checking."""
    with open(path, "w") as fh:
        K, M = lp.shape
        fh.write(f"# canonical LP: minimize c g  s.t.  A g = b, g >= 0   (K={K}, M={M})\n")
        if lp.names:
            fh.write("# names " + " ".join(lp.names) + "\n")
        fh.write("# c\n")
        np.savetxt(fh, lp.c[None, :], fmt="%.17g")
        fh.write("# A\n")
        np.savetxt(fh, lp.A, fmt="%.17g")
        fh.write("# b\n")
        np.savetxt(fh, lp.b[None, :], fmt="%.17g")


def load_lp(path) -> CanonicalLP:
    sections: dict[str, list[str]] = {}
    names: tuple = ()
    current = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("# names "):
                names = tuple(line.split()[2:])
            elif line.strip() in ("# c", "# A", "# b"):
                current = line.strip()[2:]
                sections[current] = []
            elif not line.startswith("#") and current:
                sections[current].append(line)

    def _read(key, ndmin):
        return np.loadtxt(io.StringIO("".join(sections[key])), ndmin=ndmin)

    return CanonicalLP(_read("c", 1), _read("A", 2), _read("b", 1), names)

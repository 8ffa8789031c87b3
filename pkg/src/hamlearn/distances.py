"""Physically motivated distances between Hamiltonians and their bounds.

Two distances are computed. The time-constrained distance is half the
largest diamond-norm difference between the two evolution channels over
times up to a budget T; for unitary channels it evaluates in closed form
from the eigenphases of V^dagger W, because the numerical range of a
normal operator is the convex hull of its eigenvalues: with all phases
inside an arc of length ``spread <= pi`` the hull point closest to the
origin lies on the extreme chord, at distance cos(spread/2), giving
``sqrt(1 - cos^2) = sin(spread/2)``; an arc beyond pi puts the origin
inside the hull and the distance saturates at 1. The
temperature-constrained distance is half the largest trace-norm difference
between the two Gibbs states over inverse temperatures up to B.

Suprema are taken over a uniform grid with golden-section refinement
around the best point; the certified ``grid_error`` comes from the
Lipschitz constant ``|f(t)-f(t')| <= |t-t'| (||H1||_op + ||H2||_op)``,
which holds in the same form for both distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .hamiltonian import SparseHamiltonian
from .pauli import DEFAULT_DENSE_LIMIT, PauliString

_UNITARITY_TOL = 1e-10
DEFAULT_GRID = 2048


@dataclass(frozen=True)
class DistanceResult:
    """Value of a constrained distance with its maximizer and grid bound."""

    value: float
    argmax: float
    grid_error: float
    kind: str

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": self.argmax,
            "grid_error": self.grid_error,
            "kind": self.kind,
        }


# ---------------------------------------------------------------------------
# circle arithmetic (used by the eigenphase lower bounds)
# ---------------------------------------------------------------------------


_TWO_PI = 2.0 * np.pi


def _wrap_two_pi(x):
    # np.mod of a tiny negative value can round to exactly 2 pi; fold it back.
    r = np.mod(x, _TWO_PI)
    r = np.where(r < _TWO_PI, r, 0.0)
    return float(r) if np.ndim(x) == 0 else r


def circle_p(x):
    """Projection onto [0, 2 pi) with nonnegative remainder."""
    return _wrap_two_pi(x)


def circle_q(x):
    """Projection onto [-pi, pi)."""
    return _wrap_two_pi(np.asarray(x) + np.pi) - np.pi


def minmax_closed(a: float, b: float) -> float:
    """min over x of max(|q(a-x)|, |q(b-x)|), in closed form.

    Equals half the smaller of the two phase separations
    |q(a) - q(b)| and |p(a) - p(b)|.
    """
    qa, qb = float(circle_q(a)), float(circle_q(b))
    pa, pb = float(circle_p(a)), float(circle_p(b))
    return 0.5 * min(abs(qa - qb), abs(pa - pb))


# ---------------------------------------------------------------------------
# unitary-channel diamond distance
# ---------------------------------------------------------------------------


def _unitarity_defect(u: np.ndarray) -> float:
    gram = u.conj().T @ u
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.abs(gram).max())


def _arc_half_diamond(phases: np.ndarray) -> float:
    """Half diamond distance to the identity from eigenphases on the circle."""
    if phases.size == 1:
        return 0.0
    angles = np.sort(phases)
    gaps = np.diff(angles)
    wrap = 2.0 * np.pi - (angles[-1] - angles[0])
    spread = 2.0 * np.pi - max(gaps.max(initial=0.0), wrap)
    if spread >= np.pi:
        return 1.0
    return math.sin(spread / 2.0)


def half_diamond_unitary(v: np.ndarray, w: np.ndarray) -> float:
    """Half the diamond distance between the channels of two unitaries.

    Computed as sqrt(1 - dist(0, conv(eigenvalues of V^dagger W))^2) via
    the minimal covering arc of the eigenphases.
    """
    if v.shape != w.shape or v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise DimensionMismatchError("unitaries must share a square shape")
    if _unitarity_defect(v) > _UNITARITY_TOL or _unitarity_defect(w) > _UNITARITY_TOL:
        raise ValueError("inputs are not unitary within tolerance")
    phases = np.angle(np.linalg.eigvals(v.conj().T @ w))
    return _arc_half_diamond(phases)


def _golden_max(f, lo: float, hi: float, iters: int = 50) -> tuple[float, float]:
    """Golden-section refinement of a maximum on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_v = (c, fc) if fc >= fd else (d, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        if fc >= best_v:
            best_x, best_v = c, fc
        if fd >= best_v:
            best_x, best_v = d, fd
    return best_x, best_v


def _sup_on_grid(f, budget: float, grid: int, refine: bool) -> tuple[float, float]:
    ts = np.linspace(0.0, budget, grid)
    vals = np.array([f(t) for t in ts])
    i = int(vals.argmax())
    best_x, best_v = float(ts[i]), float(vals[i])
    if refine:
        lo = ts[max(0, i - 1)]
        hi = ts[min(grid - 1, i + 1)]
        x, v = _golden_max(f, lo, hi)
        if v > best_v:
            best_x, best_v = float(x), float(v)
    return best_x, best_v


def _eigensystems(h1: SparseHamiltonian, h2: SparseHamiltonian, dense_limit: int):
    if h1.n != h2.n:
        raise DimensionMismatchError("Hamiltonians act on different qubit counts")
    w1, a = np.linalg.eigh(h1.dense_matrix(dense_limit))
    w2, b = np.linalg.eigh(h2.dense_matrix(dense_limit))
    return w1, a, w2, b


def d_T(
    h1: SparseHamiltonian,
    h2: SparseHamiltonian,
    T: float,
    grid: int = DEFAULT_GRID,
    refine: bool = True,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> DistanceResult:
    """Time-constrained diamond distance over evolution times in [0, T].

    The half diamond distance at each time comes from the eigenphase arc of
    V(t)^dagger W(t), evaluated without re-exponentiating: the eigenphases
    equal those of e^{i t L1} M e^{-i t L2} M^dagger with M the fixed
    eigenbasis overlap.
    """
    if T <= 0:
        raise ValueError("time budget must be positive")
    if grid < 2:
        raise ValueError("grid must have at least two points")
    w1, a, w2, b = _eigensystems(h1, h2, dense_limit)
    m = a.conj().T @ b
    m_dag = m.conj().T

    def f(t: float) -> float:
        x = (np.exp(1j * t * w1)[:, None] * m * np.exp(-1j * t * w2)[None, :]) @ m_dag
        return _arc_half_diamond(np.angle(np.linalg.eigvals(x)))

    argmax, value = _sup_on_grid(f, T, grid, refine)
    op1 = float(np.abs(w1).max()) if w1.size else 0.0
    op2 = float(np.abs(w2).max()) if w2.size else 0.0
    return DistanceResult(
        value=value,
        argmax=argmax,
        grid_error=(op1 + op2) * T / grid,
        kind="time_constrained",
    )


# ---------------------------------------------------------------------------
# temperature-constrained trace distance
# ---------------------------------------------------------------------------


def _gibbs_weights(evals: np.ndarray, beta: float) -> np.ndarray:
    # Shift by the smallest eigenvalue before exponentiating so large beta
    # cannot overflow.
    w = np.exp(-beta * (evals - evals.min()))
    return w / w.sum()


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diag(m)))


def d_B(
    h1: SparseHamiltonian,
    h2: SparseHamiltonian,
    B: float,
    grid: int = DEFAULT_GRID,
    refine: bool = True,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> DistanceResult:
    """Temperature-constrained trace distance over beta in [0, B].

    Gibbs states are formed in each Hamiltonian's eigenbasis; the value is
    half the trace norm of their difference, maximized on the grid. It
    never exceeds (B/2) ||H1 - H2||_op. Commuting diagonal pairs (Z-type
    Hamiltonians) skip the per-point diagonalization.
    """
    if B <= 0:
        raise ValueError("inverse-temperature budget must be positive")
    if grid < 2:
        raise ValueError("grid must have at least two points")
    if h1.n != h2.n:
        raise DimensionMismatchError("Hamiltonians act on different qubit counts")
    m1 = h1.dense_matrix(dense_limit)
    m2 = h2.dense_matrix(dense_limit)

    if _is_diagonal(m1) and _is_diagonal(m2):
        w1 = np.real(np.diag(m1))
        w2 = np.real(np.diag(m2))

        def f(beta: float) -> float:
            return 0.5 * float(np.abs(_gibbs_weights(w1, beta) - _gibbs_weights(w2, beta)).sum())

    else:
        w1, a = np.linalg.eigh(m1)
        w2, b = np.linalg.eigh(m2)
        b_dag = b.conj().T

        def f(beta: float) -> float:
            rho1 = (a * _gibbs_weights(w1, beta)) @ a.conj().T
            rho2 = (b * _gibbs_weights(w2, beta)) @ b_dag
            return 0.5 * float(np.abs(np.linalg.eigvalsh(rho1 - rho2)).sum())

    argmax, value = _sup_on_grid(f, B, grid, refine)
    op1 = float(np.abs(w1).max()) if w1.size else 0.0
    op2 = float(np.abs(w2).max()) if w2.size else 0.0
    return DistanceResult(
        value=value,
        argmax=argmax,
        grid_error=(op1 + op2) * B / grid,
        kind="temperature_constrained",
    )


def gibbs_trace_bound_check(
    h1: SparseHamiltonian,
    h2: SparseHamiltonian,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> tuple[float, float, float]:
    """Trace-norm gap of e^{H}/Tr e^{H} states against both known bounds.

    Returns ``(lhs, rhs_new, rhs_old)`` where ``lhs <= rhs_new <= rhs_old``:
    the new bound is ||H1 - H2||_op itself, the older one the exponential
    2 (e^{||H1 - H2||_op} - 1).
    """
    w1, a, w2, b = _eigensystems(h1, h2, dense_limit)
    rho1 = (a * _gibbs_weights(w1, -1.0)) @ a.conj().T
    rho2 = (b * _gibbs_weights(w2, -1.0)) @ b.conj().T
    lhs = float(np.abs(np.linalg.eigvalsh(rho1 - rho2)).sum())
    gap = (h1 - h2).op_norm(dense_limit)
    return lhs, gap, 2.0 * (math.exp(gap) - 1.0)


# ---------------------------------------------------------------------------
# tightness counterexample
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexamplePair:
    """Projector pair whose Gibbs states converge while the gap stays 2."""

    dense_1: np.ndarray
    dense_2: np.ndarray
    sparse_1: SparseHamiltonian
    sparse_2: SparseHamiltonian


def counterexample_family(n: int, dense_limit: int = DEFAULT_DENSE_LIMIT) -> CounterexamplePair:
    """The pair +-(|0..0><0..0| - |1..1><1..1|) on n qubits.

    Its operator-norm gap is 2 for every n, yet for any fixed inverse
    temperature budget the Gibbs states approach each other at rate 2^-n:
    no lower bound on the temperature-constrained distance in terms of the
    operator norm can exist. The Pauli decomposition consists of the
    2^{n-1} odd-weight Z-type strings with coefficients 2^{1-n}.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > dense_limit:
        from .errors import CapacityError

        raise CapacityError(f"counterexample at n={n} > dense limit {dense_limit}")
    dim = 1 << n
    d1 = np.zeros((dim, dim), dtype=complex)
    d1[0, 0] = 1.0
    d1[dim - 1, dim - 1] = -1.0
    coeff = 2.0 ** (1 - n)
    terms = {
        PauliString(n, 0, z): coeff for z in range(1, dim) if z.bit_count() % 2 == 1
    }
    sparse_1 = SparseHamiltonian(n, terms)
    return CounterexamplePair(
        dense_1=d1,
        dense_2=-d1,
        sparse_1=sparse_1,
        sparse_2=sparse_1.scaled(-1.0),
    )


def counterexample_trace_distance(n: int, beta: float) -> float:
    """Closed-form trace norm ||rho_1(beta) - rho_2(beta)||_tr of the pair."""
    return 2.0 * (math.exp(beta) - math.exp(-beta)) / (2.0**n - 2.0 + math.exp(beta) + math.exp(-beta))


# ---------------------------------------------------------------------------
# eigenphase lower bounds
# ---------------------------------------------------------------------------


def eigenphase_lower_bound(
    h: SparseHamiltonian, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> float:
    """Spectral lower bound on the half diamond distance of e^{-iH} to Id.

    Evaluates (1/2 pi) max over eigenvalue pairs of the smaller circular
    separation min(|p(l_j) - p(l_k)|, |q(l_j) - q(l_k)|); for traceless H
    with ||H||_op <= pi/2 this is itself at least ||H||_op / (2 pi).
    """
    evals = h.spectral_data(dense_limit).eigenvalues
    p = circle_p(evals)
    q = circle_q(evals)
    dp = np.abs(p[:, None] - p[None, :])
    dq = np.abs(q[:, None] - q[None, :])
    return float(np.minimum(dp, dq).max() / (2.0 * np.pi))

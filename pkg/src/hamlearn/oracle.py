"""Simulated time-evolution access model with full resource accounting.

An :class:`EvolutionOracle` wraps a true :class:`SparseHamiltonian` and
answers the queries a learning protocol is allowed to make: forward
evolution ``e^{-iHt}``, conjugation-restricted evolution
``e^{-it H_{Q_1..Q_r}}`` (optionally with a known drift pulse added to one
coefficient), and Bell-basis Pauli sampling of a unitary's Choi state.
Every answered query charges a :class:`ResourceLedger` with the figures of
merit tracked throughout: experiments, total evolution time, query count,
minimum time resolution and ancilla qubits.

Two backends are available. In ``exact`` mode restricted evolutions are
materialized by eigendecomposition while the ledger still records the
query count and time resolution that the second-order product formula
would need (Trotterization preserves total evolution time, so that counter
is charged the plain ``t``). In ``trotter`` mode the symmetric product over
the ``2^r`` conjugated summands is actually multiplied out, guaranteeing
the configured diamond-norm budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import pauli as pl
from .errors import BudgetError, CapacityError
from .hamiltonian import SparseHamiltonian
from .pauli import DEFAULT_DENSE_LIMIT, PauliString

# Restricted term sets up to this size with pairwise-commuting members are
# expanded in closed form instead of densely exponentiated.
_STRUCTURED_TERM_CAP = 10

_UNITARITY_TOL = 1e-10


# ---------------------------------------------------------------------------
# resource ledger
# ---------------------------------------------------------------------------


@dataclass
class ResourceLedger:
    """Monotone counters for the cost of a simulated protocol run."""

    experiments: int = 0
    total_evolution_time: float = 0.0
    queries: int = 0
    min_time_resolution: float = math.inf
    ancilla_qubits: int = 0

    def charge_evolution(self, t: float, queries: int = 1, resolution: float | None = None):
        self.total_evolution_time += t
        self.queries += queries
        if resolution is None:
            resolution = t
        if resolution > 0:
            self.min_time_resolution = min(self.min_time_resolution, resolution)

    def charge_experiment(self, count: int = 1, ancilla: int = 0):
        self.experiments += count
        self.ancilla_qubits = max(self.ancilla_qubits, ancilla)

    def merge(self, other: "ResourceLedger") -> "ResourceLedger":
        """Associative combination of ledgers from independent runs."""
        return ResourceLedger(
            experiments=self.experiments + other.experiments,
            total_evolution_time=self.total_evolution_time + other.total_evolution_time,
            queries=self.queries + other.queries,
            min_time_resolution=min(self.min_time_resolution, other.min_time_resolution),
            ancilla_qubits=max(self.ancilla_qubits, other.ancilla_qubits),
        )

    def to_json_dict(self) -> dict:
        res = self.min_time_resolution
        return {
            "experiments": self.experiments,
            "total_time": self.total_evolution_time,
            "queries": self.queries,
            "min_resolution": None if math.isinf(res) else res,
            "ancilla": self.ancilla_qubits,
        }


@dataclass(frozen=True)
class OracleConfig:
    """Knobs of the simulated access model.

    ``spam_lambda`` is the strength of the depolarizing mixture applied to
    the Choi-state outcome distribution, modeling a combined
    state-preparation and measurement error of the same diamond-norm size.
    ``trotter_epsilon`` is the diamond-norm budget granted to product
    formulas; ``kappa`` the explicit constant in their step count.
    """

    mode: str = "exact"
    spam_lambda: float = 0.0
    trotter_epsilon: float = 0.01
    kappa: float = 1.0
    seed: int | None = None
    dense_limit: int = DEFAULT_DENSE_LIMIT
    query_budget: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "trotter"):
            raise ValueError(f"unknown oracle mode {self.mode!r}")
        if not 0.0 <= self.spam_lambda < 1.0:
            raise ValueError("spam_lambda must lie in [0, 1)")
        if self.trotter_epsilon <= 0:
            raise ValueError("trotter_epsilon must be positive")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")


@dataclass(frozen=True)
class TrotterPlan:
    """Second-order product-formula plan for R summands of norm <= c.

    The step count is ``l = ceil(kappa * sqrt((R c t)^3 / epsilon))``; one
    execution applies ``2 R l`` factors of duration ``t / (2 l)`` each.
    """

    R: int
    c: float
    t: float
    epsilon: float
    kappa: float
    l: int = field(init=False)

    def __post_init__(self):
        steps = self.kappa * math.sqrt((self.R * self.c * self.t) ** 3 / self.epsilon)
        object.__setattr__(self, "l", max(1, math.ceil(steps)))

    @property
    def query_count(self) -> int:
        return 2 * self.R * self.l

    @property
    def per_query_time(self) -> float:
        return self.t / (2 * self.l)


def plan_trotter(R: int, c: float, t: float, epsilon: float, kappa: float = 1.0) -> TrotterPlan:
    return TrotterPlan(R=R, c=c, t=t, epsilon=epsilon, kappa=kappa)


# ---------------------------------------------------------------------------
# Pauli-coefficient transform
# ---------------------------------------------------------------------------

# Map from single-qubit matrix entries (i*2+j) to Pauli coefficients, row
# order (I, X, Y, Z): a_P = Tr[P A] / 2.
_SINGLE_QUBIT_TRANSFORM = 0.5 * np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
        [1, 0, 0, -1],
    ],
    dtype=complex,
)


def pauli_transform(u: np.ndarray) -> np.ndarray:
    """All 4^n Pauli coefficients of a 2^n x 2^n matrix.

    Returns the flat array ``c`` with ``u = sum_P c[P.index] * dense(P)``,
    computed by n successive single-qubit 4-point transforms in O(n 4^n).
    """
    dim = u.shape[0]
    n = dim.bit_length() - 1
    if u.shape != (dim, dim) or 1 << n != dim:
        raise ValueError("matrix dimension is not a power of two")
    tensor = u.reshape((2,) * (2 * n))
    for k in range(n):
        # Row axis of qubit k sits at position k, column axis at position n
        # (earlier qubits have already collapsed into single axes).
        moved = np.moveaxis(tensor, (k, n), (0, 1))
        rest = moved.shape[2:]
        flat = moved.reshape(4, -1)
        out = _SINGLE_QUBIT_TRANSFORM @ flat
        tensor = np.moveaxis(out.reshape((4,) + rest), 0, k)
    return tensor.reshape(-1)


def pauli_coefficient(u: np.ndarray, p: PauliString) -> complex:
    """Single Pauli coefficient ``Tr[P u] / 2^n`` in O(2^n)."""
    dim = u.shape[0]
    if dim != 1 << p.n:
        raise ValueError("matrix dimension does not match Pauli qubit count")
    cols = np.arange(dim)
    signs = 1.0 - 2.0 * (np.bitwise_count(cols & p.z_bits) & 1)
    phase = 1j ** ((p.x_bits & p.z_bits).bit_count() % 4)
    return complex(phase * np.sum(signs * u[cols, cols ^ p.x_bits]) / dim)


def _unitarity_defect(u: np.ndarray) -> float:
    gram = u.conj().T @ u
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.abs(gram).max())


# ---------------------------------------------------------------------------
# the oracle
# ---------------------------------------------------------------------------


class EvolutionOracle:
    """Simulated access to the time evolution of a hidden Hamiltonian.

    The oracle owns a ledger and an RNG; independent trials should use
    independent oracle instances with seeds derived from a master seed.
    """

    def __init__(
        self,
        hamiltonian: SparseHamiltonian,
        config: OracleConfig | None = None,
        rng: np.random.Generator | None = None,
        ledger: ResourceLedger | None = None,
    ):
        self.hamiltonian = hamiltonian
        self.config = config or OracleConfig()
        self.ledger = ledger if ledger is not None else ResourceLedger()
        self.rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        self._eig_cache: tuple[np.ndarray, np.ndarray] | None = None
        self._op_norm_cache: float | None = None

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    # -- internals ------------------------------------------------------

    def _check_capacity(self):
        if self.n > self.config.dense_limit:
            raise CapacityError(
                f"oracle simulation at n={self.n} > dense limit {self.config.dense_limit}"
            )

    def _eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        if self._eig_cache is None:
            self._check_capacity()
            evals, evecs = np.linalg.eigh(self.hamiltonian.dense_matrix(self.config.dense_limit))
            self._eig_cache = (evals, evecs)
        return self._eig_cache

    def _op_norm(self) -> float:
        if self._op_norm_cache is None:
            evals, _ = self._eigensystem()
            self._op_norm_cache = float(np.abs(evals).max()) if evals.size else 0.0
        return self._op_norm_cache

    def _restricted_terms(
        self,
        qs: Sequence[PauliString],
        drift: tuple[PauliString, float] | None,
    ) -> list[tuple[PauliString, float]]:
        restricted = self.hamiltonian.restrict(qs)
        if drift is not None:
            p0, d = drift
            if abs(d) > 4.0:
                raise ValueError(f"drift coefficient {d} outside supported range")
            restricted = restricted.add_term(p0, d)
        return list(restricted.terms.items())

    def _trotter_plan(self, r: int, t: float) -> TrotterPlan:
        R = 1 << r
        return plan_trotter(
            R=R,
            c=self._op_norm() / R,
            t=t,
            epsilon=self.config.trotter_epsilon,
            kappa=self.config.kappa,
        )

    def _charge_restricted(self, r: int, t: float, executions: int = 1) -> None:
        """Ledger charges of `executions` runs of a restricted evolution.

        Trotterization preserves total evolution time, so time is charged
        at face value; the query counter and time resolution record what
        the 2^r-summand product formula would need.
        """
        if r == 0:
            self.ledger.charge_evolution(
                executions * t, queries=executions, resolution=t if t > 0 else None
            )
            return
        plan = self._trotter_plan(r, t)
        queries = (1 << r) * plan.l
        if self.config.query_budget is not None and executions * queries > self.config.query_budget:
            raise BudgetError(
                f"{executions} restricted evolution(s) need {executions * queries} queries"
                f" > budget {self.config.query_budget}"
            )
        resolution = plan.per_query_time / (1 << r)
        self.ledger.charge_evolution(
            executions * t,
            queries=executions * queries,
            resolution=resolution if t > 0 else None,
        )

    # -- evolution queries -------------------------------------------------

    def evolve(self, t: float) -> np.ndarray:
        """Return ``e^{-iHt}``; charges one query of duration ``t``."""
        if t < 0:
            raise ValueError("negative evolution time (model reversal as conjugation)")
        evals, evecs = self._eigensystem()
        u = (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
        self.ledger.charge_evolution(t, queries=1, resolution=t if t > 0 else None)
        return u

    def evolve_restricted(
        self,
        qs: Sequence[PauliString],
        t: float,
        drift: tuple[PauliString, float] | None = None,
    ) -> np.ndarray:
        """Return ``e^{-it(H_{Q_1..Q_r} + d P_0)}`` and charge the ledger.

        In exact mode the restricted Hamiltonian is exponentiated directly;
        in trotter mode the symmetric product over all ``2^r`` conjugated
        summands is executed and is within the configured diamond budget of
        the exact evolution. Drift pulses are known unitaries and charge
        nothing.
        """
        if t < 0:
            raise ValueError("negative evolution time")
        self._check_capacity()
        qs = list(qs)
        if self.config.mode == "trotter" and qs:
            u = self._execute_trotter(qs, t, drift)
        else:
            u = self._exact_restricted_unitary(qs, t, drift)
        self._charge_restricted(len(qs), t)
        return u

    def _exact_restricted_unitary(self, qs, t, drift) -> np.ndarray:
        if not qs and drift is None:
            evals, evecs = self._eigensystem()
            return (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T
        terms = self._restricted_terms(qs, drift)
        h = SparseHamiltonian(self.n, dict(terms))
        evals, evecs = np.linalg.eigh(h.dense_matrix(self.config.dense_limit))
        return (evecs * np.exp(-1j * t * evals)) @ evecs.conj().T

    def _execute_trotter(self, qs, t, drift) -> np.ndarray:
        """Multiply out the second-order product formula for H_{Q_1..Q_r}.

        The summands are H_S = C_S H C_S / 2^r over subsets S of the
        conjugation strings (C_S the product of the selected Q_i), each
        implemented as one query to the true evolution at time t/(2^{r+1}l).
        """
        r = len(qs)
        plan = self._trotter_plan(r, t)
        evals, evecs = self._eigensystem()
        tau = t / ((1 << r) * 2 * plan.l)
        base = (evecs * np.exp(-1j * tau * evals)) @ evecs.conj().T

        factors = []
        for mask in range(1 << r):
            prod = PauliString.identity(self.n)
            for i in range(r):
                if mask >> i & 1:
                    prod, _ = pl.multiply(qs[i], prod)
            d = pl.dense(prod, self.config.dense_limit)
            factors.append(d @ base @ d.conj().T)
        if drift is not None:
            p0, dcoef = drift
            theta = dcoef * t / (2 * plan.l)
            eye = np.eye(1 << self.n, dtype=complex)
            factors.append(
                math.cos(theta) * eye - 1j * math.sin(theta) * pl.dense(p0, self.config.dense_limit)
            )

        # One block is F_R ... F_1 F_1 ... F_R with F_i applied innermost-first.
        inner_up = np.eye(1 << self.n, dtype=complex)
        for f in factors:
            inner_up = f @ inner_up
        inner_down = np.eye(1 << self.n, dtype=complex)
        for f in reversed(factors):
            inner_down = f @ inner_down
        return np.linalg.matrix_power(inner_up @ inner_down, plan.l)

    # -- Pauli (Bell-basis) sampling ----------------------------------------

    def pauli_sample(self, u: np.ndarray, rng: np.random.Generator | None = None) -> PauliString:
        """Sample P with probability ``(1-lam)|u_P|^2 + lam 4^{-n}``.

        This simulates preparing the Choi state of ``u`` with ``n`` ancilla
        qubits and measuring in the Bell basis, with the configured SPAM
        depolarization mixed in. Charges one experiment.
        """
        self._check_capacity()
        dim = 1 << self.n
        if u.shape != (dim, dim):
            raise ValueError("unitary has wrong dimension for this oracle")
        if _unitarity_defect(u) > _UNITARITY_TOL:
            raise ValueError("input matrix is not unitary within tolerance")
        rng = rng if rng is not None else self.rng
        self.ledger.charge_experiment(1, ancilla=self.n)
        lam = self.config.spam_lambda
        if lam > 0.0 and rng.random() < lam:
            return pl.random_uniform(self.n, rng)
        probs = np.abs(pauli_transform(u)) ** 2
        total = probs.sum()
        if abs(total - 1.0) > 1e-8:
            raise ValueError("Pauli coefficients of input violate Parseval identity")
        idx = int(rng.choice(probs.size, p=probs / total))
        return PauliString.from_index(self.n, idx)

    def sample_restricted(
        self,
        qs: Sequence[PauliString],
        t: float,
        drift: tuple[PauliString, float] | None = None,
    ) -> PauliString:
        """One full experiment: restricted evolution then Pauli sampling.

        Ledger charges equal ``evolve_restricted`` plus ``pauli_sample``.
        Small commuting survivor sets take a closed-form path that avoids
        dense work; the outcome distribution is identical.
        """
        if t < 0:
            raise ValueError("negative evolution time")
        self._check_capacity()
        qs = list(qs)
        self._charge_restricted(len(qs), t)
        self.ledger.charge_experiment(1, ancilla=self.n)

        lam = self.config.spam_lambda
        if lam > 0.0 and self.rng.random() < lam:
            return pl.random_uniform(self.n, self.rng)

        if self.config.mode == "trotter" and qs:
            probs = np.abs(pauli_transform(self._execute_trotter(qs, t, drift))) ** 2
            idx = int(self.rng.choice(probs.size, p=probs / probs.sum()))
            return PauliString.from_index(self.n, idx)

        amplitudes = self._structured_amplitudes(self._restricted_terms(qs, drift), t)
        if amplitudes is not None:
            outcomes = list(amplitudes)
            probs = np.array([abs(amplitudes[p]) ** 2 for p in outcomes])
            idx = int(self.rng.choice(len(outcomes), p=probs / probs.sum()))
            return outcomes[idx]
        probs = np.abs(pauli_transform(self._exact_restricted_unitary(qs, t, drift))) ** 2
        idx = int(self.rng.choice(probs.size, p=probs / probs.sum()))
        return PauliString.from_index(self.n, idx)

    def _structured_amplitudes(
        self, terms: list[tuple[PauliString, float]], t: float
    ) -> dict[PauliString, complex] | None:
        """Pauli amplitudes of ``e^{-itH}`` for mutually commuting terms.

        Expands ``prod_k (cos(h_k t) I - i sin(h_k t) P_k)`` with exact
        phase tracking; returns None when the term set is too large or not
        pairwise commuting.
        """
        if len(terms) > _STRUCTURED_TERM_CAP:
            return None
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                if pl.symplectic_product(terms[i][0], terms[j][0]):
                    return None
        amps: dict[PauliString, complex] = {PauliString.identity(self.n): 1.0 + 0.0j}
        for p, c in terms:
            cos_a = math.cos(c * t)
            sin_a = math.sin(c * t)
            nxt: dict[PauliString, complex] = {}
            for q, amp in amps.items():
                nxt[q] = nxt.get(q, 0.0) + amp * cos_a
                rq, phase = pl.multiply(p, q)
                nxt[rq] = nxt.get(rq, 0.0) + amp * phase * (-1j * sin_a)
            amps = nxt
        return amps

    # -- single-coefficient estimation ---------------------------------------

    def target_coefficient(
        self,
        qs: Sequence[PauliString],
        drift: tuple[PauliString, float] | None,
        p0: PauliString,
        t: float,
    ) -> complex:
        """Exact Pauli coefficient of ``p0`` in the restricted evolution."""
        if self.config.mode == "trotter" and qs:
            return pauli_coefficient(self._execute_trotter(list(qs), t, drift), p0)
        terms = self._restricted_terms(qs, drift)
        amps = self._structured_amplitudes(terms, t)
        if amps is not None:
            return amps.get(p0, 0.0 + 0.0j)
        return pauli_coefficient(self._exact_restricted_unitary(list(qs), t, drift), p0)

    def estimate_pauli_coeff_magnitude(
        self,
        qs: Sequence[PauliString],
        drift: tuple[PauliString, float] | None,
        p0: PauliString,
        t: float,
        shots: int,
    ) -> float:
        """Empirical estimate of ``|u_{p0}|`` from ``shots`` Pauli samples.

        The outcome count is binomial with success probability
        ``(1-lam)|u_{p0}|^2 + lam 4^{-n}``; the returned value is the
        square root of the bias-corrected empirical frequency. Charges
        ``shots`` experiments, each with one restricted evolution of
        duration ``t``.
        """
        if shots < 1:
            raise ValueError("shots must be >= 1")
        if t < 0:
            raise ValueError("negative evolution time")
        self._check_capacity()
        qs = list(qs)
        amp = self.target_coefficient(qs, drift, p0, t)
        self._charge_restricted(len(qs), t, executions=shots)
        self.ledger.charge_experiment(shots, ancilla=self.n)

        lam = self.config.spam_lambda
        uniform = 4.0 ** (-self.n)
        prob = (1.0 - lam) * min(1.0, abs(amp) ** 2) + lam * uniform
        freq = self.rng.binomial(shots, prob) / shots
        corrected = (freq - lam * uniform) / (1.0 - lam)
        return math.sqrt(max(0.0, corrected))


# ---------------------------------------------------------------------------
# product-formula calibration
# ---------------------------------------------------------------------------


def calibrate_trotter_kappa(
    epsilon: float,
    n: int = 3,
    r: int = 2,
    t: float = 1.0,
    trials: int = 3,
    seed: int = 0,
    start: float = 1.0,
    max_doublings: int = 10,
) -> float:
    """Double ``kappa`` until executed products meet the diamond budget.

    Random small instances are evolved both exactly and with the product
    formula; the diamond distance between the two unitary channels is
    evaluated in closed form. Returns the first ``kappa`` whose executions
    all fit within ``epsilon``.
    """
    from .distances import half_diamond_unitary
    from .hamiltonian import random_instance

    kappa = start
    for _ in range(max_doublings):
        rng = np.random.default_rng(seed)
        ok = True
        for _ in range(trials):
            h = random_instance(n, s=3, rng=rng)
            qs = [pl.random_uniform(n, rng) for _ in range(r)]
            exact = EvolutionOracle(h, OracleConfig(mode="exact", trotter_epsilon=epsilon))
            trotter = EvolutionOracle(
                h, OracleConfig(mode="trotter", trotter_epsilon=epsilon, kappa=kappa)
            )
            u_exact = exact.evolve_restricted(qs, t)
            u_trot = trotter.evolve_restricted(qs, t)
            if 2.0 * half_diamond_unitary(u_exact, u_trot) > epsilon:
                ok = False
                break
        if ok:
            return kappa
        kappa *= 2.0
    raise RuntimeError(f"kappa calibration failed to meet epsilon={epsilon}")

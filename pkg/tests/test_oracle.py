"""Oracle: evolution queries, Pauli sampling, Trotter execution, ledger."""

import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import kron_hamiltonian, kron_pauli
from hamlearn import pauli as pl
from hamlearn.errors import BudgetError, CapacityError
from hamlearn.hamiltonian import SparseHamiltonian, random_instance
from hamlearn.oracle import (
    EvolutionOracle,
    OracleConfig,
    ResourceLedger,
    calibrate_trotter_kappa,
    pauli_coefficient,
    pauli_transform,
    plan_trotter,
)
from hamlearn.pauli import PauliString

P = PauliString.from_label


def H(n, labelled):
    return SparseHamiltonian(n, {P(k): v for k, v in labelled.items()})


def make_oracle(h, seed=0, **cfg):
    return EvolutionOracle(h, OracleConfig(**cfg), rng=np.random.default_rng(seed))


# -- ledger ------------------------------------------------------------------


def test_ledger_charges_and_merge():
    a = ResourceLedger()
    a.charge_evolution(2.0, queries=3, resolution=0.5)
    a.charge_experiment(2, ancilla=4)
    b = ResourceLedger()
    b.charge_evolution(1.0, queries=1, resolution=0.25)
    b.charge_experiment(1, ancilla=2)
    m = a.merge(b)
    assert m.experiments == 3
    assert m.total_evolution_time == pytest.approx(3.0)
    assert m.queries == 4
    assert m.min_time_resolution == 0.25
    assert m.ancilla_qubits == 4
    # Associativity.
    c = ResourceLedger(experiments=5)
    assert a.merge(b).merge(c) == a.merge(b.merge(c))


def test_ledger_json_keys():
    led = ResourceLedger()
    doc = led.to_json_dict()
    assert doc == {
        "experiments": 0,
        "total_time": 0.0,
        "queries": 0,
        "min_resolution": None,
        "ancilla": 0,
    }


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(mode="approx")
    with pytest.raises(ValueError):
        OracleConfig(spam_lambda=1.0)
    with pytest.raises(ValueError):
        OracleConfig(trotter_epsilon=0.0)


def test_trotter_plan_arithmetic():
    plan = plan_trotter(R=4, c=0.5, t=2.0, epsilon=0.01, kappa=1.0)
    assert plan.l == math.ceil(math.sqrt((4 * 0.5 * 2.0) ** 3 / 0.01))
    assert plan.query_count == 2 * 4 * plan.l
    assert plan.per_query_time == pytest.approx(2.0 / (2 * plan.l))
    assert plan_trotter(R=1, c=0.0, t=0.0, epsilon=1.0, kappa=1.0).l == 1


# -- evolve --------------------------------------------------------------------


def test_evolve_diagonal_case():
    oracle = make_oracle(H(1, {"Z": 0.5}))
    u = oracle.evolve(np.pi)
    assert np.allclose(u, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]))
    assert oracle.ledger.queries == 1
    assert oracle.ledger.total_evolution_time == pytest.approx(np.pi)
    assert oracle.ledger.min_time_resolution == pytest.approx(np.pi)


def test_evolve_t_zero():
    oracle = make_oracle(H(1, {"Z": 0.5}))
    u = oracle.evolve(0.0)
    assert np.allclose(u, np.eye(2))
    assert oracle.ledger.queries == 1
    assert oracle.ledger.total_evolution_time == 0.0
    assert math.isinf(oracle.ledger.min_time_resolution)


def test_evolve_rejects_negative_time():
    with pytest.raises(ValueError):
        make_oracle(H(1, {"Z": 0.5})).evolve(-1.0)


def test_evolve_matches_scipy_expm():
    rng = np.random.default_rng(3)
    for _ in range(10):
        h = random_instance(3, 4, rng)
        t = float(rng.uniform(0.1, 3.0))
        u = make_oracle(h).evolve(t)
        assert np.allclose(u, expm(-1j * t * kron_hamiltonian({p.label: c for p, c in h})), atol=1e-10)


def test_evolve_unitary_and_reversible():
    rng = np.random.default_rng(4)
    h = random_instance(3, 5, rng)
    oracle = make_oracle(h)
    u = oracle.evolve(1.7)
    defect = np.abs(u.conj().T @ u - np.eye(8)).max()
    assert defect < 1e-10
    assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-12


def test_evolve_capacity():
    h = SparseHamiltonian(13, {PauliString(13, 1, 0): 0.5})
    with pytest.raises(CapacityError):
        make_oracle(h).evolve(1.0)


# -- evolve_restricted --------------------------------------------------------


def test_restricted_empty_equals_evolve():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    u1 = make_oracle(h).evolve(0.8)
    u2 = make_oracle(h).evolve_restricted([], 0.8)
    assert np.allclose(u1, u2)


def test_restricted_single_survivor_closed_form():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    u = make_oracle(h).evolve_restricted([P("XI")], 1.0)
    expected = math.cos(0.5) * np.eye(4) - 1j * math.sin(0.5) * kron_pauli("XX")
    assert np.allclose(u, expected, atol=1e-12)
    # Oracle route: dense exponential of the restricted assembly.
    assert np.allclose(u, expm(-1j * kron_hamiltonian({"XX": 0.5})), atol=1e-10)


def test_restricted_with_drift():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    u = make_oracle(h).evolve_restricted([P("XI")], 1.0, drift=(P("XX"), -0.5))
    assert np.allclose(u, np.eye(4), atol=1e-12)  # drift cancels the survivor
    with pytest.raises(ValueError):
        make_oracle(h).evolve_restricted([P("XI")], 1.0, drift=(P("XX"), 5.0))


def test_restricted_ledger_accounting():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    oracle = make_oracle(h, trotter_epsilon=0.01)
    r, t = 2, 1.5
    qs = [P("XI"), P("IZ")]
    oracle.evolve_restricted(qs, t)
    plan = plan_trotter(R=4, c=h.op_norm() / 4, t=t, epsilon=0.01)
    assert oracle.ledger.total_evolution_time == pytest.approx(t)
    assert oracle.ledger.queries == (1 << r) * plan.l
    assert oracle.ledger.min_time_resolution == pytest.approx(t / ((1 << (r + 1)) * plan.l))
    # Total time adds up across calls regardless of the Trotter overhead.
    oracle.evolve_restricted(qs, 0.5)
    assert oracle.ledger.total_evolution_time == pytest.approx(2.0)


def test_restricted_query_budget():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    oracle = make_oracle(h, query_budget=3)
    with pytest.raises(BudgetError):
        oracle.evolve_restricted([P("XI"), P("IZ"), P("YY")], 1.0)


def test_estimate_shot_count_budget():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    oracle = make_oracle(h, query_budget=10_000)
    qs = [P("XI")]
    oracle.estimate_pauli_coeff_magnitude(qs, None, P("XX"), 1.0, shots=10)
    with pytest.raises(BudgetError):
        oracle.estimate_pauli_coeff_magnitude(qs, None, P("XX"), 1.0, shots=10_000)


def test_trotter_mode_matches_exact_within_budget():
    rng = np.random.default_rng(6)
    for epsilon in (0.1, 0.01):
        h = random_instance(3, 3, rng)
        qs = [pl.random_uniform(3, rng) for _ in range(2)]
        exact = make_oracle(h, mode="exact").evolve_restricted(qs, 1.0)
        trot = make_oracle(h, mode="trotter", trotter_epsilon=epsilon).evolve_restricted(qs, 1.0)
        # Operator-norm distance bounds the channel diamond distance by 2x.
        gap = np.linalg.norm(exact - trot, 2)
        assert 2 * gap <= 2 * epsilon


def test_trotter_mode_drift_included():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    qs = [P("XI")]
    exact = make_oracle(h).evolve_restricted(qs, 1.0, drift=(P("XX"), 0.25))
    trot = make_oracle(h, mode="trotter", trotter_epsilon=0.01).evolve_restricted(
        qs, 1.0, drift=(P("XX"), 0.25)
    )
    assert np.linalg.norm(exact - trot, 2) < 0.01


def test_trotter_error_decreases_with_step_count():
    # ZZ survives conjugation by ZI while XI and YZ are killed; the two
    # halves do not commute, so the product formula is genuinely approximate.
    h = H(2, {"ZZ": 0.6, "XI": 0.5, "YZ": 0.4})
    qs = [P("ZI")]
    exact = make_oracle(h).evolve_restricted(qs, 2.0)
    errors = []
    for epsilon in (0.5, 0.05, 0.005):
        trot = make_oracle(h, mode="trotter", trotter_epsilon=epsilon).evolve_restricted(qs, 2.0)
        errors.append(np.linalg.norm(exact - trot, 2))
    assert errors[0] >= errors[1] >= errors[2]


def test_calibrate_trotter_kappa_small():
    kappa = calibrate_trotter_kappa(epsilon=0.1, n=2, r=1, trials=2, seed=1)
    assert kappa >= 1.0


# -- Pauli transform -----------------------------------------------------------


def test_pauli_transform_matches_direct_traces():
    rng = np.random.default_rng(9)
    for n in (1, 2, 3):
        m = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        coeffs = pauli_transform(m)
        for idx in range(4**n):
            p = PauliString.from_index(n, idx)
            direct = np.trace(kron_pauli(p.label) @ m) / 2**n
            assert np.isclose(coeffs[idx], direct, atol=1e-12)


def test_pauli_transform_recovers_basis_vectors():
    for idx in range(16):
        p = PauliString.from_index(2, idx)
        coeffs = pauli_transform(pl.dense(p))
        expected = np.zeros(16)
        expected[idx] = 1.0
        assert np.allclose(coeffs, expected, atol=1e-12)


def test_pauli_coefficient_single_entry():
    rng = np.random.default_rng(10)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    coeffs = pauli_transform(m)
    for idx in (0, 5, 17, 63):
        p = PauliString.from_index(3, idx)
        assert np.isclose(pauli_coefficient(m, p), coeffs[idx], atol=1e-12)


def test_parseval_for_unitaries():
    rng = np.random.default_rng(21)
    for n in (2, 4, 6):
        h = random_instance(n, 5, rng)
        u = make_oracle(h).evolve(1.3)
        probs = np.abs(pauli_transform(u)) ** 2
        assert abs(probs.sum() - 1.0) < 1e-10


# -- Pauli sampling -------------------------------------------------------------


def test_pauli_sample_pure_rotation_extremes():
    oracle = make_oracle(H(1, {"Z": 1.0}), seed=2)
    u = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])  # theta = pi/2
    for _ in range(20):
        assert oracle.pauli_sample(u) == P("Z")
    assert oracle.ledger.experiments == 20
    assert oracle.ledger.ancilla_qubits == 1
    for _ in range(5):
        assert oracle.pauli_sample(np.eye(2, dtype=complex)).is_identity


def test_pauli_sample_rotation_half_probability():
    # theta = pi/4: P(Z) = sin^2 = 1/2.
    oracle = make_oracle(H(1, {"Z": 1.0}), seed=3)
    theta = np.pi / 4
    u = np.diag([np.exp(-1j * theta), np.exp(1j * theta)])
    hits = sum(oracle.pauli_sample(u) == P("Z") for _ in range(10_000))
    assert abs(hits / 10_000 - 0.5) < 0.02


def test_pauli_sample_rejects_non_unitary():
    oracle = make_oracle(H(1, {"Z": 1.0}))
    with pytest.raises(ValueError):
        oracle.pauli_sample(np.array([[1.0, 0.1], [0.0, 1.0]], dtype=complex))


def test_pauli_sample_spam_mixture():
    # Empirical distribution must match (1-lam)|u_P|^2 + lam/4^n.
    lam = 0.3
    theta = np.pi / 3
    oracle = make_oracle(H(1, {"Z": 1.0}), seed=5, spam_lambda=lam)
    u = np.diag([np.exp(-1j * theta), np.exp(1j * theta)])
    shots = 40_000
    counts = {"I": 0, "X": 0, "Y": 0, "Z": 0}
    for _ in range(shots):
        counts[oracle.pauli_sample(u).label] += 1
    expected = {
        "I": (1 - lam) * np.cos(theta) ** 2 + lam / 4,
        "Z": (1 - lam) * np.sin(theta) ** 2 + lam / 4,
        "X": lam / 4,
        "Y": lam / 4,
    }
    for label, prob in expected.items():
        sd = math.sqrt(prob * (1 - prob) / shots)
        assert abs(counts[label] / shots - prob) < 4 * sd + 1e-9


def test_sample_restricted_structured_matches_dense_distribution():
    # The closed-form amplitude expansion must agree exactly with the
    # dense transform for commuting survivor sets, collisions included.
    rng = np.random.default_rng(30)
    cases = [
        H(2, {"XX": 0.5}),
        H(2, {"XX": 0.5, "ZZ": -0.4}),
        H(3, {"XXI": 0.5, "ZZI": -0.4, "YYI": 0.7}),  # product collides with members
    ]
    for h in cases:
        oracle = make_oracle(h)
        amps = oracle._structured_amplitudes(list(h.terms.items()), 0.9)
        assert amps is not None
        dense_u = expm(-1j * 0.9 * kron_hamiltonian({p.label: c for p, c in h}))
        coeffs = pauli_transform(dense_u)
        for idx in range(4**h.n):
            p = PauliString.from_index(h.n, idx)
            assert np.isclose(amps.get(p, 0.0), coeffs[idx], atol=1e-12)


def test_sample_restricted_charges_like_evolve_plus_sample():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    qs = [P("XI"), P("IZ")]
    a = make_oracle(h, seed=1)
    a.sample_restricted(qs, 1.2)
    b = make_oracle(h, seed=1)
    b.pauli_sample(b.evolve_restricted(qs, 1.2))
    assert a.ledger == b.ledger


def test_sample_restricted_noncommuting_falls_back_to_dense():
    h = H(1, {"X": 0.4, "Z": 0.3})  # anticommuting survivors
    oracle = make_oracle(h, seed=7)
    assert oracle._structured_amplitudes(list(h.terms.items()), 1.0) is None
    outcome = oracle.sample_restricted([], 1.0)
    assert outcome.n == 1


# -- coefficient estimation -----------------------------------------------------


def test_estimate_single_survivor_small_angle():
    # h_P = 0.001, t = 1/(800 C eps) with eps = 0.001: |u_P| = sin(h t).
    h_p = 0.001
    t = 1.0 / (800.0 * 1.0 * 0.001)
    h = H(2, {"XX": h_p})
    oracle = make_oracle(h, seed=11)
    est = oracle.estimate_pauli_coeff_magnitude([], None, P("XX"), t, shots=10_000)
    assert abs(est - abs(math.sin(h_p * t))) < 0.02


def test_estimate_zero_coefficient():
    h = H(2, {"XX": 0.5})
    oracle = make_oracle(h, seed=12)
    est = oracle.estimate_pauli_coeff_magnitude([], None, P("ZZ"), 0.5, shots=10_000)
    assert est < 0.02


def test_estimate_spam_bias_correction():
    h = H(2, {"XX": 0.5})
    oracle = make_oracle(h, seed=13, spam_lambda=0.1)
    ident = PauliString.identity(2)
    est = oracle.estimate_pauli_coeff_magnitude([], None, ident, 0.0, shots=50_000)
    assert abs(est - 1.0) < 0.01


def test_estimate_in_trotter_mode_uses_executed_unitary():
    # The estimator reads the coefficient off whatever the backend actually
    # produces; at a tight budget it agrees with the exact single-survivor law.
    h = H(2, {"XX": 0.05, "ZI": 0.3})
    qs = [P("XI")]
    t = 1.0
    oracle = make_oracle(h, seed=21, mode="trotter", trotter_epsilon=1e-4)
    est = oracle.estimate_pauli_coeff_magnitude(qs, None, P("XX"), t, shots=200_000)
    assert abs(est - abs(math.sin(0.05 * t))) < 0.01


def test_estimate_charges_all_shots():
    h = H(2, {"XX": 0.5, "ZI": 0.3})
    oracle = make_oracle(h, seed=14)
    qs = [P("XI")]
    oracle.estimate_pauli_coeff_magnitude(qs, None, P("XX"), 1.0, shots=500)
    led = oracle.ledger
    assert led.experiments == 500
    assert led.total_evolution_time == pytest.approx(500 * 1.0)
    plan = plan_trotter(R=2, c=h.op_norm() / 2, t=1.0, epsilon=0.01)
    assert led.queries == 500 * 2 * plan.l
    assert led.ancilla_qubits == 2


def test_ledger_serialization_schema():
    jsonschema = pytest.importorskip("jsonschema")
    import importlib.resources as res

    schema = json.loads(res.files("hamlearn").joinpath("schemas/ledger.schema.json").read_text())
    oracle = make_oracle(H(1, {"Z": 0.5}))
    oracle.evolve(1.0)
    jsonschema.validate(oracle.ledger.to_json_dict(), schema)

"""Time-constrained and temperature-constrained Hamiltonian distances.

Walks through the two physically motivated distances on closed-form
examples, checks their operator-norm bounds on random pairs, and prints
the projector family showing that no operator-norm lower bound can exist
for the thermal distance: the Gibbs states collapse onto each other at
rate 2^-n while the operator gap stays exactly 2.
"""

import numpy as np

from hamlearn.distances import (
    counterexample_family,
    counterexample_trace_distance,
    d_B,
    d_T,
    gibbs_trace_bound_check,
)
from hamlearn.hamiltonian import SparseHamiltonian, random_instance
from hamlearn.pauli import PauliString

P = PauliString.from_label
rng = np.random.default_rng(3)

print("=== opposite single-qubit fields: +-0.5 Z ===")
h1 = SparseHamiltonian(1, {P("Z"): 0.5})
h2 = SparseHamiltonian(1, {P("Z"): -0.5})
for T in (0.5, np.pi / 2, 4.0):
    res = d_T(h1, h2, T=T)
    print(f"  d_T at budget {T:5.3f}: {res.value:.5f} (maximizer t = {res.argmax:.3f})")
print("  closed form: sin(t) until it pins at 1 from t = pi/2 on")
res = d_B(SparseHamiltonian(1, {P("Z"): 1.0}), SparseHamiltonian(1, {P("Z"): -1.0}), B=1.0)
print(f"  d_B at budget 1 for +-Z: {res.value:.5f} = tanh(1) = {np.tanh(1.0):.5f}")

print()
print("=== operator-norm bounds on random pairs (n = 3) ===")
print(f"{'gap':>7} {'d_T(T=1)':>9} {'sin bound':>10} {'d_B(B=1)':>9} {'B/2 bound':>10}")
for _ in range(5):
    a = random_instance(3, 3, rng).scaled(0.4)
    b = random_instance(3, 3, rng).scaled(0.4)
    gap = (a - b).op_norm()
    dt = d_T(a, b, T=1.0).value
    db = d_B(a, b, B=1.0).value
    print(
        f"{gap:>7.4f} {dt:>9.4f} {np.sin(min(np.pi / 2, gap)):>10.4f}"
        f" {db:>9.4f} {gap / 2:>10.4f}"
    )

print()
print("=== Gibbs trace-norm bound vs the older exponential one ===")
a = random_instance(2, 3, rng)
b = random_instance(2, 3, rng)
lhs, rhs_new, rhs_old = gibbs_trace_bound_check(a, b)
print(f"  ||rho1 - rho2||_tr = {lhs:.4f} <= {rhs_new:.4f} (gap) <= {rhs_old:.4f} (2(e^gap - 1))")

print()
print("=== no thermal lower bound: the projector pair ===")
print(f"{'n':>3} {'op gap':>7} {'closed form at beta=1':>22} {'d_B (B=1)':>10}")
for n in (2, 4, 6, 8, 10):
    pair = counterexample_family(n)
    res = d_B(pair.sparse_1, pair.sparse_2, B=1.0, grid=128)
    print(
        f"{n:>3} {2.0:>7.1f} {counterexample_trace_distance(n, 1.0):>22.6f}"
        f" {res.value:>10.6f}"
    )
print("The thermal distance decays like 2^-n at fixed budget although the")
print("Hamiltonians stay a constant operator distance apart.")

"""The gate set of the simulator: RX, RZX and RXX.

All gates are exp(-i*theta/2 * G) with involutory generators, which is what
makes the +-pi/2 parameter-shift rule exact. RXX(pi) swaps a qubit pair's
basis states up to a global -i phase, the mechanism behind the two-vertex
swap perturbation.
"""
import numpy as np

import edvqe as E

# RX drives <Z> from +1 to cos(theta)
for theta in (0.0, np.pi / 2, np.pi):
    s = E.init_state(1)
    E.apply_rx(s, 0, theta)
    print(f"RX({theta:4.2f}) on |0>: <Z> = {E.expect_z(s, 0):+.3f}")

# RXX at pi/2 creates an entangled pair with perfect ZZ correlation
s = E.init_state(2)
E.apply_rxx(s, 0, 1, np.pi / 2)
print(f"\nRXX(pi/2)|00>: amplitudes {np.round(s.amps, 6)}")
print(f"<Z0> = {E.expect_z(s, 0):+.3f}, <Z0 Z1> = {E.expect_zz(s, 0, 1):+.3f}")

# RXX at pi performs the pair swap up to a global phase
s = E.init_state(2)
s.amps[:] = 0.0
s.amps[1] = 1.0  # |01>: qubit 0 set
E.apply_rxx(s, 0, 1, np.pi)
print(f"\nRXX(pi) maps |01> to {np.round(s.amps, 6)}  (-i |10>)")

# a layered circuit run through the shared executor
circuit = E.build_ansatz(block_size=4, layers=2)
params = np.random.default_rng(1).uniform(0, 2 * np.pi, circuit.n_params)
state = E.run_circuit(circuit, params)
print(f"\n4-qubit ansatz, {circuit.n_params} parameters: norm = {state.norm():.12f}")
print("samples:", E.sample_bits(state, 5, seed=0).tolist())

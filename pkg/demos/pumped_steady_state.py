"""Steady-state entanglement under continuous resonant pumping.

Too little pump and the qubits sit in the ground state; too much and they
saturate into a mixed state. In between there is a dome, and its top moves
off the diagonal when the two qubits are pumped unequally.
"""
import numpy as np

from nrentangle.coupling import CouplingRates
from nrentangle.dynamics import DriveParams, steady_state
from nrentangle.entanglement import wootters

env = CouplingRates.two_qubit(1.0, gamma21=0.9)
om = np.logspace(-2, 1, 19)

# %% equal pumping
diag = [wootters(steady_state(env, DriveParams(o, o))) for o in om]
for o, c in zip(om, diag):
    print(f"Omega = {o:8.4f}  C_ss = {c:.4f}  " + "#" * int(200 * c))

# %% unequal pumping
grid = np.array([[wootters(steady_state(env, DriveParams(a, b))) for b in om] for a in om])
i, j = np.unravel_index(grid.argmax(), grid.shape)
print(f"\nbest equal pump:   C_ss = {max(diag):.4f}")
print(f"best unequal pump: C_ss = {grid.max():.4f} at Omega1 = {om[i]:.3f}, Omega2 = {om[j]:.3f}")

"""
Wave-plate settings for arbitrary rotations
===========================================

Compile single-qubit unitaries into quarter/half/quarter wave-plate angles.
"""

import numpy as np
from scipy.stats import unitary_group

from witfam.waveplates import format_table, phase_distance, sandwich, solve_angles

print(format_table())

u = unitary_group.rvs(2, random_state=5)
t = solve_angles(u)
print("random unitary ->", np.round(np.degrees(t), 3), "deg; residual", phase_distance(u, sandwich(t)))

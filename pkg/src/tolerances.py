"""Numerical tolerances shared by every module."""

# Structural checks: unitarity, distributions, cross-backend equivalence.
STRUCTURAL_TOL = 1e-10

# Norm bookkeeping after unitary operations.
NORM_TOL = 1e-12

# Largest register the dense statevector engine accepts.
MAX_QUBITS = 24

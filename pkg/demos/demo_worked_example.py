"""Walk through the fully worked single-pole symbol.

The scalar symbol h(z) = -(1 - 0.5 z) (an ARMA-type spectral density
w = |h|^2 with one pole parameter p = 0.5) is small enough that every
quantity in the library has a hand-checkable value. This script builds
the symbol, prints the coefficient sequences, assembles the 2 x 2 block
Toeplitz matrix and its inverse by all three routes, and shows the
rank-correction identity that powers the linear-time solver.

Run:  python3 demos/demo_worked_example.py
"""

import numpy as np

from blocktoeplitz import (ClosedFormKit, CoefficientTables, SolveVectors,
                           dense_inverse, dense_toeplitz,
                           inverse_matrix_closed, inverse_matrix_series,
                           scalar_single_pole, validate)

np.set_printoptions(precision=10, suppress=True)

p, rho = 0.5, 1.0
spec = scalar_single_pole(p, rho)
print("== symbol ==")
print(f"h(z) = -(1 - {p} z) / {rho};  pole parameter p = {p}")
print(validate(spec), "\n")

tab = CoefficientTables(spec)
print("== coefficient sequences ==")
print("a_k   (power series of -1/h):",
      [round(float(tab.a(k).real[0, 0]), 6) for k in range(5)])
print("c_k   (power series of h)   :",
      [round(float(tab.c(k).real[0, 0]), 6) for k in range(5)])
print("gamma (autocovariance)      :",
      [round(float(tab.gamma(k).real[0, 0]), 6) for k in range(4)])
print("beta  (phase coefficients)  :",
      [round(float(tab.beta(k).real[0, 0]), 6) for k in range(1, 5)])
print()

n = 2
print(f"== T_{n} and its inverse ==")
t2 = dense_toeplitz(spec, n, tab)
print("T_2(w) =\n", t2.data.real)
inv_dense = dense_inverse(spec, n, tab).data
inv_closed = inverse_matrix_closed(spec, n, tables=tab)
inv_series = inverse_matrix_series(tab, n, tol=1e-12)
print("dense LU inverse     =\n", inv_dense.real)
print("closed-form inverse  deviation:",
      np.abs(inv_closed - inv_dense).max())
print("series-formula inverse deviation:",
      np.abs(inv_series - inv_dense).max())
print()

print("== rank-correction identity ==")
sv = SolveVectors(ClosedFormKit(spec), n)
ell = np.array([sv.ell(s)[0, 0] for s in (1, 2)])
r = np.array([sv.r(s)[0, 0] for s in (1, 2)])
a2 = rho * np.array([[1.0, 0.0], [p, 1.0]])          # lower factor A_2
lhs = a2.conj().T @ a2 + np.outer(ell, r)
print("l vectors:", ell)
print("r vectors:", r)
print("A_2* A_2 + l r  =\n", lhs.real)
print("matches T_2^{-1} within", np.abs(lhs - inv_dense).max())

"""Finite solutions converging to the infinite-system solution.

For a summable right-hand side the solution of the order-n system
approaches the solution of the corresponding one-sided infinite system:
the l1 block deviation sum_k ||z_{n,k} - z_k|| goes to zero. For the
rational symbols here the decay is geometric, which the table makes
plain.

Run:  python3 demos/demo_convergence.py
"""

import numpy as np

from blocktoeplitz import (convergence_experiment, random_spec, scalar_ar,
                           scalar_single_pole)

cases = [
    ("single pole p=0.5 (d=1)", scalar_single_pole(0.5, 1.0), 0.6),
    ("AR(2) 1/(1 - .5z - .2z^2)", scalar_ar([0.5, 0.2]), 0.5),
    ("random d=2, K=2", random_spec(d=2, K=2, mults=(1, 2), m0=1,
                                    rng=np.random.default_rng(7)), 0.5),
]

ns = [4, 8, 16, 32, 64, 128]
for label, spec, decay in cases:
    ks = np.arange(1, max(ns) + 128)
    y = (decay ** ks)[:, None, None] * np.eye(spec.d)
    rep = convergence_experiment(spec, y, ns)
    print(f"== {label}, y_k = {decay}^k I ==")
    print(f"{'n':>5}  {'sum_k ||z_nk - z_k||':>22}")
    for n, delta in rep.rows():
        print(f"{n:>5}  {delta:22.6e}")
    print(f"  ratio delta({ns[-1]})/delta({ns[0]}): "
          f"{rep.deltas[-1] / rep.deltas[0]:.2e}\n")

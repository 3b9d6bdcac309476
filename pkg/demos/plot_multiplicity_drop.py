"""
Kerneling lowers the multiplicity
=================================

One kerneling step keeps the first r equations and appends the entries of
the Schur complement of the Jacobian.  The new system has the same root
with a strictly smaller multiplicity, so the sequence must stop.
"""
import numpy as np

from multroot import jacobian, kerneling, numerical_rank, parse_system, recenter
from multroot.multiplicity import multiplicity

systems = {
    "x^2, y^2": "vars: x y\na = x^2\nb = y^2",
    "x^2 + y^3, x^2 - y^3": "vars: x y\na = x^2 + y^3\nb = x^2 - y^3",
    "x^3, y - x^2": "vars: x y\na = x^3\nb = y - x^2",
    "worked example": open(__file__.replace("plot_multiplicity_drop.py", "example.sys")).read(),
}

# %%
# At the exact root the truncation order only has to exceed the degrees
# that the oracle inspects.
for name, text in systems.items():
    f = parse_system(text)
    F = recenter(f, np.zeros(f.n_vars), 12)
    mus = [multiplicity(F, np.zeros(f.n_vars)).mu]
    while True:
        prof = numerical_rank(jacobian(F).at_center())
        if prof.rank == f.n_vars:
            break
        F = kerneling(F, prof.rank, prof)
        mus.append(multiplicity(F, np.zeros(f.n_vars)).mu)
    print(f"{name:24s} multiplicities along the sequence: {mus}")

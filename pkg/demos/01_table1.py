# %% [markdown]
# Special states and the two frame potentials
# ===========================================
#
# For a prime dimension d we compare three families of states against the
# stabilizer MUB: stabilizer states (the "worst" states for both potentials),
# Alltop vectors, and SIC fiducials (f_SIC = 0).

# %%
from fractions import Fraction

from farstab.analysis import table1

for d in (2, 3, 5, 7):
    print(f"d = {d}")
    for name, quantity, value, expected, ok in table1(d):
        exact = Fraction(expected).limit_denominator(10_000)
        print(f"  {name:<10} {quantity:<6} {value:.12f}   closed form {str(exact):>7}   {'ok' if ok else 'MISMATCH'}")

# %% [markdown]
# The inequality f_SIC >= d^2/(d-1) f_MUS is an equality for every state when
# d = 2 or 3.  For d = 5 random states sit strictly above the line.

# %%
import numpy as np

from farstab import potentials as pot
from farstab.algebra import build_group
from farstab.explore import random_states, restart_rng
from farstab.mubs import stabilizer_mubs

for d in (3, 5):
    g = build_group(d)
    psi = random_states(restart_rng(0, 0), 5000, d)
    gaps = pot.inequality_gaps(g, stabilizer_mubs(g)[0], psi)
    print(f"d={d}: gap range [{gaps.min():.3e}, {gaps.max():.3e}]")

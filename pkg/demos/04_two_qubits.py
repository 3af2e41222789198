# %% [markdown]
# Two qubits: six MUBs, no SIC among stabilizer-friendly states
# =============================================================
#
# In d = 4 the bipartite group H(2) x H(2) gives 15 petals grouped into six
# flowers, hence six complete stabilizer MUBs and 60 stabilizer states.

# %%
import numpy as np

from farstab import potentials as pot
from farstab.algebra import build_group
from farstab.analysis import classify_bases_d4
from farstab.explore import TABLE2_VALUES, table2
from farstab.mubs import enumerate_flowers, enumerate_petals, stabilizer_mubs, stabilizer_states
from farstab.states import alltop_fiducial_d4, find_mub_balanced

g = build_group(4, "bipartite")
print(len(enumerate_petals(g)), "petals,", len(enumerate_flowers(g)), "flowers,", len(stabilizer_states(g)), "stabilizer states")
print(*classify_bases_d4(), sep="\n")

# %% [markdown]
# How small can the sum of the first k MUB potentials be?  (Small restart
# budget here; the acceptance suite uses 1000 restarts per row.)

# %%
for k, res in enumerate(table2(restarts=150, seed=7, polish=20), start=1):
    print(f"k={k}: {res.value:.10f}   (reference {TABLE2_VALUES[k - 1]:.10f})")

# %% [markdown]
# The Alltop-type vector minimises f_SIC; its orbit forms four MUBs.
# The MUB-balanced state with respect to one MUB has f_SIC = 0.32.

# %%
mubs = stabilizer_mubs(g)
for name, psi in (("alltop", alltop_fiducial_d4()), ("balanced", find_mub_balanced(4)[0])):
    fm = np.array([pot.f_mus(m, psi) for m in mubs])
    print(f"{name:<9} f_SIC {float(pot.f_sic(g, psi)):.6f}  f_MUS per MUB {np.round(fm, 6)}")

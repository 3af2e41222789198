# %% [markdown]
# Seven dimensions: the states antipodal to SICs
# ==============================================
#
# Among minimum uncertainty states (f_MUS = 0) the SIC fiducials minimise
# f_SIC.  Maximising instead, every restart converges to f_SIC = 7/8, and the
# maximisers turn out to be MUB-balanced states in a negative-parity
# eigenspace.

# %%
import numpy as np

from farstab.algebra import build_group
from farstab.explore import max_f_sic_on_mus
from farstab.mubs import stabilizer_mubs
from farstab.states import balance_defect, parity_residual

g = build_group(7)
mub = stabilizer_mubs(g)[0]
res = max_f_sic_on_mus(7, restarts=30, seed=0)
tops = -res.values[res.converged_mask]
print(f"{res.converged_mask.sum()} converged restarts, f_SIC in [{tops.min():.10f}, {tops.max():.10f}]")
print("largest balance defect :", max(balance_defect(mub, s) for s in res.states[res.converged_mask]))
print("largest parity residual:", max(parity_residual(g, s) for s in res.states[res.converged_mask]))

# %% [markdown]
# Searching the negative-parity eigenspace directly gives 21 balanced states.
# Their orthogonality graph is regular.

# %%
from farstab.analysis import orthogonality_graph
from farstab.states import find_mub_balanced

states = find_mub_balanced(7)
graph = orthogonality_graph(states)
print(f"{len(states)} balanced states, degrees {sorted(set(graph.degrees.tolist()))}, {graph.edge_count} edges")

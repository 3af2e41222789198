# %% [markdown]
# f_SIC on a real Zauner subspace in d = 7
# ========================================
#
# The order-3 Clifford |k> -> |2k> has a real 3-dimensional eigenspace.  Its
# projective points form a real projective plane, drawn here through a
# stereographic chart of the upper hemisphere (the unit disk).

# %%
import numpy as np

from farstab.analysis import zauner_real_map

m = zauner_real_map(7, grid_n=161, restarts=40)
print(f"grid maximum of f_SIC: {m.grid_max:.4f}")
for label, points in m.marked.items():
    print(f"{label:<6} {len(points)} points, f_SIC values {sorted(round(v, 6) for _, v in points)}")

# %% [markdown]
# A coarse ASCII rendering shaded by decile, darker characters meaning larger
# f_SIC.  Blank cells lie outside the chart.

# %%
shades = ".:-=+*#%@&"
step = 6
coarse = m.f_sic[::step, ::step]
edges = np.nanquantile(coarse, np.linspace(0, 1, len(shades) + 1)[1:-1])
for row in coarse:
    print("".join(" " if np.isnan(v) else shades[np.searchsorted(edges, v)] for v in row))

# %% [markdown]
# Fubini-Study averages
# =====================
#
# Sampling normalised complex Gaussian vectors gives FS-random states.  Their
# mean potentials match the closed forms.

# %%
from farstab import potentials as pot
from farstab.explore import fs_functional, mc_average

for d in (2, 3, 4, 5, 7):
    for name, exact in (("fsic", pot.fs_average_f_sic(d)), ("fmus", pot.fs_average_f_mus(d))):
        mean, err = mc_average(fs_functional(name, d), d, 200_000, seed=1)
        print(f"d={d} {name}: {mean:.5f} +- {err:.5f}   exact {exact:.5f}")

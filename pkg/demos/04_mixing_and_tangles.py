# Mixing rate and tangles
#
# d(k)^(1/k) approaches |lambda_2|. Forward balls of radius t are tangled
# when they hold two independent cycles.

import numpy as np

from digraph_spectra.degrees import regular
from digraph_spectra.sampler import derive_seed, sample_digraph
from digraph_spectra.spectrum import eigenvalues
from digraph_spectra.tangle import default_t, tangled_centers
from digraph_spectra.transition import build_P
from digraph_spectra.walks import mixing_trace

g = sample_digraph(regular(100, 3), derive_seed(7, 0))
P = build_P(g)
trace = mixing_trace(P, 300)
lam2 = eigenvalues(P).lambda2_mod
for k in (10, 50, 100, 300):
    print(f"k={k:3d} d(k)={trace.d[k - 1]:.3e} d(k)^(1/k)={trace.roots[k - 1]:.4f}")
print("|lambda_2| =", round(lam2, 4))

# Count tangled balls as n doubles. The count falls steadily with n.

for n in (250, 500, 1000, 2000):
    t = default_t(n, 3)
    counts = [len(tangled_centers(sample_digraph(regular(n, 3), derive_seed(11, k)), t))
              for k in range(10)]
    print(f"n={n:5d} t={t} mean tangled balls {np.mean(counts):.1f}")

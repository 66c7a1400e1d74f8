"""Sweep the doubly erased private state and compare against its bound.

With a maximally entangled key the optimum meets the lower bound exactly.
The mixed-shield private state sits on or above it. The CSV written here
has the same columns as ``unext sweep``.
"""

import sys

from unext.cli import sweep_rows, write_sweep_csv
from unext.states import doubly_erased_private, mixed_shield_private_state
from unext.unextendible import doubly_erased_bound, emin

grid = [0.0, 0.25, 0.5, 0.75, 1.0]
rows = sweep_rows("doubly-erased", grid, k=2)
write_sweep_csv(rows, sys.stdout)

print("\nmixed-shield key, k=2")
gamma = mixed_shield_private_state()
for p in grid:
    rep = emin(doubly_erased_private(gamma, p))
    print(f"  p={p:<4}: emin={rep.value_bits:.6f}  bound={doubly_erased_bound(p, 2):.6f}  "
          f"from key value={rep.chain_value:.6f}")

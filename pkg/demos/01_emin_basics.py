"""Compute the min-unextendible entanglement of a few standard states.

A maximally entangled pair cannot be shared with a second copy of Bob, so
its value is log2 d. Erasing Bob's half with any probability below one
makes the state shareable, and the value drops to zero.
"""

import math

from unext import emin
from unext.states import erased_state, max_entangled, werner_state

print("maximally entangled states")
for d in (2, 3):
    rep = emin(max_entangled(d))
    print(f"  d={d}: emin={rep.value_bits:.6f} bits (log2 d = {math.log2(d):.6f}), "
          f"{rep.iterations} solver iterations")

print("erased states, d=2")
for p in (0.0, 0.5, 0.9, 0.99, 1.0):
    print(f"  p={p:<5}: emin={emin(erased_state(p, 2)).value_bits:.3e} bits")

print("Werner state p=0.7, d=2 is full rank:")
print(f"  emin={emin(werner_state(0.7, 2)).value_bits:.3e} bits")

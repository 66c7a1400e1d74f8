"""Show a state with positive coherent information but zero emin, then verify.

The erased state at p=0.75 has coherent information above 0.2 bits, so
approximate distillation succeeds, while its emin of zero rules out exact
heralded key. The second half runs two verification suites and prints
their case counts.
"""

from unext.cli import sweep_rows
from unext.verify import run_suite

(row,) = sweep_rows("erased", [0.75], d=2)
print(f"erased(0.75, 2): coherent info = {row['coherent_info_bits']:.4f} bits, "
      f"emin = {row['emin_bits']:.2e} bits, super two-extendible = {row['is_2ext_sup']}")

for report in run_suite(["erased-state", "flag-normalization"], seed=1):
    worst = min(c.slack for c in report.cases)
    print(f"{report.theorem_id}: {'pass' if report.passed else 'FAIL'} "
          f"({len(report.cases)} cases, smallest slack {worst:.2e})")

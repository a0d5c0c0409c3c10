"""
Stability regions under second-derivative noise
===============================================

The scalar amplification factor of a two-derivative method is a polynomial
R(z) built from z (first derivative) and z^2 (second derivative) terms.
When the second derivative carries a relative error delta, every z^2 turns
into z^2 (1 + delta), and the region |R| <= 1 shrinks.  This script scans
three methods at increasing noise and writes one SVG + boundary CSV per
(method, noise) pair.

The noise levels to care about are not hypothetical: at half precision the
dense squared differentiation matrix on 50 points carries a relative error
near 1, which is exactly the regime where the eroded regions below say the
step size has to shrink.
"""

from tdrk_lab import (Build, Format, characterize_epsilon, emit_region_svg,
                      get_method, scan_region)

print("measured second-derivative noise on the 50-point advection operator:")
for low, build in ((Format.B16, Build.NATIVE), (Format.B16, Build.DOWNCAST),
                   (Format.B32, Build.NATIVE)):
    eps = characterize_epsilon("advection", 50, low, build)
    tag = "in-format" if build is Build.NATIVE else "once-rounded"
    print(f"  {low.value} {tag:>12}: eps_eff = {eps:.3e}")

for name in ("TDRK2s3p1e", "TDRK2s3p2e", "TDRK3s3p3e"):
    tab = get_method(name).tableau
    print(f"\n{name}")
    for eps in (0.0, 0.1, 0.5):
        scan = scan_region(tab, epsilon=eps, label=name)
        path = emit_region_svg(scan, f"demo_out/{name}_eps{eps:g}.svg")
        print(f"  eps={eps:<4g} stable cells {scan.stable_cells:>6}  "
              f"-> {path}")

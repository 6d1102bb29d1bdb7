"""Teleporting a coherent-state qubit with an exact cat resource.

A qubit mu|a> + nu|-a> is mixed with one half of the entangled pair
|a,a> - |-a,-a> on a 50:50 beamsplitter and both ports are counted.  Zero
photons on one port and an odd number on the other teleports the qubit
perfectly; an even count leaves a Z error that cannot be undone directly;
no photons at all is a failure.
"""

import math

from catsim import QubitSpec, ResourceKind, min_p_succ, p_fail_closed, teleport
from catsim.teleport import E, O, Z

alpha = 1.0
kind = ResourceKind.exact_cat()

print("Outcome table for three inputs at alpha = 1:")
for label, theta, phi in [("|a>", 0.0, 0.0), ("|a>+|-a>", math.pi / 4, 0.0), ("|a>-|-a>", math.pi / 4, math.pi)]:
    rep = teleport(QubitSpec(alpha, theta, phi), kind)
    zo = rep.outcomes[(Z, O)]
    print(
        f"  {label:10s} P(odd)={rep.p_odd:.4f}  P(even)={rep.p_even:.4f}  "
        f"P(fail)={rep.p_fail:.4f}  F(zero,odd)={zo.fidelity:.12f}"
    )

# The odd outcome always has probability 1/2; the rest splits between even
# results and failures in an input-dependent way.
q = QubitSpec(alpha, math.pi / 4)
print(f"\nClosed-form failure for |a>+|-a>: {p_fail_closed(q):.6f}")

value, theta, phi = min_p_succ(alpha)
print(f"Worst input when even results are retried: P_succ={value:.6f} at theta={theta:.4f}, phi={phi:.4f}")

# Smaller cats fail more often; at alpha -> 0 only the odd half survives.
for a in (0.25, 0.5, 1.0, 1.5, 2.0):
    print(f"  alpha={a:4.2f}  worst-case P_succ={min_p_succ(a, grid=32)[0]:.4f}")

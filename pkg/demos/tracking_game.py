"""
Why the origin value is positive
================================

The lower bound comes from a strategy for the maximising player: push right
at full speed until the two coordinates are ``eps`` apart, then copy the
opponent. The minimiser then faces a choice. Either it lets the gap open,
and the payoff is at least ``eps``, or it tracks, and both players get
carried a distance equal to the driver's variation, deep into the region
where the payoff is 1.

This script plays the strategy against every piecewise-constant reply on
eight pieces and reports the best one.
"""

from roughhj.game_oracle import (
    ControlFamily,
    PiecewiseConstant,
    adversary_search,
    best_response_dp,
    delta_eps,
    simulate,
)
from roughhj.signal import zigzag

path = zigzag(1.0, 4, 1.0)
R = 1.0

track = simulate(path, delta_eps(0.1), PiecewiseConstant.const(1.0, path.T))
print(f"tracking reply ends at {track.final}; the gap never opens (tau = {track.tau})")

for eps in (0.5, 0.3, 0.2, 0.1):
    beta, j = adversary_search(path, delta_eps(eps), R, ControlFamily(pieces=8))
    _, j_dp = best_response_dp(path, eps, R)
    print(f"eps={eps:<4} best reply {beta.values} payoff {j:.4f} (dynamic programming {j_dp:.4f})")

# The minimiser's best answer is to let the gap open immediately, which costs
# exactly eps. Shrinking eps lowers the guarantee toward the partition bound of
# the continuum problem, which the finite family can only approach from above.

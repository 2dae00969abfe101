#!/usr/bin/env python3
"""Relative localization: why the time-average is the right estimator.

Ten sensors on a complete graph measure pairwise differences of their
unknown positions, corrupted by Gaussian noise.  The synchronous
gradient iteration converges to the least-squares estimate; the gossip
version updates one random pair per step and keeps oscillating, but the
per-node clock averages settle on the same least-squares solution.
"""

import numpy as np

from gossipsim import (
    complete_graph,
    grad_descent,
    ls_oracle,
    make_stream,
    run_gossip_localization,
    synth_measurements,
)
from gossipsim.random_engine import STREAM_TRUE_STATE

# --- problem setup ---------------------------------------------------------
n = 10
graph = complete_graph(n)
rng_seed = 42
true_state = make_stream(rng_seed, STREAM_TRUE_STATE).standard_normal(n)
meas = synth_measurements(graph, true_state, sigma=0.1, seed=rng_seed)
oracle = ls_oracle(graph, meas)
print(f"complete graph on {n} nodes, {graph.edge_count} edges, noise std 0.1")
print(f"least-squares estimate (zero-mean): {np.round(oracle, 3)}")

# --- synchronous gradient descent ------------------------------------------
tau = 0.5 / graph.max_degree
sync = grad_descent(graph, meas, tau, steps=400)
print(f"\ngradient descent, tau={tau:.3f}:")
for k in (0, 10, 50, 400):
    err = np.abs(sync.states[k] - oracle).max()
    print(f"  step {k:4d}: |x - estimate|_inf = {err:.2e}")

# --- gossip with local-clock averaging --------------------------------------
result = run_gossip_localization(graph, meas, gamma=0.5, steps=10**5,
                                 seed=rng_seed, thin=5000)
log = result.log
print("\ngossip (one random pair per step):")
print("  step      raw err    averaged err")
for t in range(0, log.n_rows, 4):
    print(f"  {int(log.steps[t]):7d}   {log.columns['err_x_inf'][t]:.3e}   "
          f"{log.columns['err_xtilde_inf'][t]:.3e}")

raw_var = result.raw_window_variance.mean()
smooth_var = result.smoothed_window_variance.mean()
print(f"\nvariance over the last 10% of steps: raw {raw_var:.2e}, "
      f"averaged {smooth_var:.2e} (ratio {raw_var / smooth_var:.0f}x)")
print("the raw estimates never settle; their clock averages do.")

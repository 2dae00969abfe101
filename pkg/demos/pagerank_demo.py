#!/usr/bin/env python3
"""PageRank with one activated link per step.

The classical power iteration multiplies the full link matrix every
round.  The gossip variant touches a single random link per step and
leaks a tiny uniform share to every page, chosen so the *expected*
update reproduces the power iteration.  The score vector itself keeps
fluctuating; its running average converges to the ranking.
"""

import numpy as np

from gossipsim import (
    fixed_point,
    pagerank_system,
    power_method,
    r_from_m,
    random_web_graph,
    run_gossip_pagerank,
)

# --- a random strongly connected web ----------------------------------------
graph = random_web_graph(20, extra_edges=40, seed=7)
m = 0.15
pi = fixed_point(pagerank_system(graph, m))
top = np.argsort(pi)[::-1][:5]
print(f"{graph.n} pages, {graph.edge_count} links, teleport fraction m={m}")
print("top pages by exact ranking:", ", ".join(f"{i} ({pi[i]:.4f})" for i in top))

# --- synchronous power iteration --------------------------------------------
traj = power_method(graph, m, steps=60, x0=np.full(graph.n, 1.0 / graph.n))
for k in (0, 5, 20, 60):
    print(f"  power iteration step {k:2d}: l1 error {np.abs(traj.states[k] - pi).sum():.2e}")

# --- gossip: one link per step ----------------------------------------------
params = r_from_m(m, graph.edge_count)
print(f"\ngossip step parameter r = {params.r:.6f} (mixing alpha = {params.alpha:.6f})")
result = run_gossip_pagerank(graph, m, steps=10**6, seed=7, thin=10**5)
log = result.log
print("  step        |avg - ranking|_1   min entry   sum")
for t in range(log.n_rows):
    print(f"  {int(log.steps[t]):8d}   {log.columns['l1_error_vs_pi'][t]:.4e}"
          f"          {log.columns['min_entry'][t]:.2e}   "
          f"{log.columns['sum_entries'][t]:.12f}")
print("\nthe raw vector stays stochastic to machine precision at every step,")
print("and the running average drifts onto the exact ranking at rate ~1/sqrt(k).")

"""Damped coordinate minimization next to the classical scheme.

Both solvers loop through the coordinates, minimizing the objective one
mean at a time with a closed-form logistic update.  The damped variant
adds a KL pull toward the previous value of the coordinate, weighted by
lam.  That small change buys a convergence guarantee, and because lam
can be taken arbitrarily small, the damped trajectory can be made to
shadow the classical one as closely as desired.
"""

import numpy as np

from proxmf import EnergyModel, SolverConfig, classic_solve, solve


def banner(text):
    print()
    print("=" * 72)
    print(text)
    print("=" * 72)


model = EnergyModel(n=2, terms=[((0, 1), 1.0)], priors=[0.5, 0.5])

banner("A coupled pair, damped run (lam = 0.1)")
final, trace = solve(model, SolverConfig(lam=0.1, epsilon=1e-10))
print(f"  termination : {trace.reason} after {trace.sweeps} sweeps")
print(f"  final state : {final.q}")
print(f"  final grad  : {trace.final.grad_norm:.3e}")
print()
print(f"  {'sweep':>5}  {'objective':>16}  {'grad norm':>12}  {'step norm':>12}")
for rec in trace.records[:8]:
    print(f"  {rec.sweep:>5}  {rec.g:>16.12f}  {rec.grad_norm:>12.3e}"
          f"  {rec.step_norm:>12.3e}")
print("  ...")

banner("Classical scheme (lam = 0) on the same model")
final0, trace0 = classic_solve(model, SolverConfig(epsilon=1e-10))
print(f"  termination : {trace0.reason} after {trace0.sweeps} sweeps")
print(f"  final state : {final0.q}")
print("  (the classical scheme carries no convergence guarantee in")
print("   general; on this instance it happens to behave)")

banner("Shrinking lam makes the damped trajectory shadow the classic one")
horizon = 20
runs = {}
for lam in (0.0, 1.0, 0.1, 0.01, 0.001):
    _, tr = solve(model, SolverConfig(lam=lam, epsilon=1e-300,
                                      max_sweeps=horizon))
    runs[lam] = tr
base = runs[0.0]
print(f"  max distance to the lam=0 trajectory over the first {horizon} sweeps:")
for lam in (1.0, 0.1, 0.01, 0.001):
    tr = runs[lam]
    gap = max(
        float(np.linalg.norm(tr.records[t].q - base.records[t].q))
        for t in range(horizon + 1)
    )
    print(f"    lam = {lam:<6g} -> {gap:.3e}")

banner("The objective never increases, for any damping weight")
for lam in (0.0, 0.1, 1.0):
    tr = runs.get(lam)
    if tr is None:
        continue
    gs = [r.g for r in tr.records]
    drops = all(b <= a + 1e-12 for a, b in zip(gs, gs[1:]))
    print(f"  lam = {lam:<4g}: monotone decrease over {len(gs) - 1} sweeps: {drops}")

banner("Damping keeps every update inside the confinement box")
from proxmf import energy_bounds, iterate_box

box = iterate_box(model, energy_bounds(model))
inside = all(box.contains(r.q, tol=1e-12) for r in trace.records)
print(f"  box per coordinate: [{box.lower[0]:.6f}, {box.upper[0]:.6f}]")
print(f"  all {len(trace.records)} snapshots inside: {inside}")

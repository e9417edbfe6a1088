"""
Approach to the dark state
==========================

Integrate the master equation from the equal mixture and watch the upper
level empty while the lower pair settles into the dark superposition.  The
trapping is slow at weak fields: the pumping rate is about alpha^2 / gamma.
"""

import numpy as np

from darkhole import IntegrationPolicy, build_liouvillian, integrate, mixed_state, scenario_preset
from darkhole.dynamics import default_burn_in, pumping_rate

params = scenario_preset("fig4").params.replace(chi=0)
L = build_liouvillian(params)
print(f"pumping rate {pumping_rate(params):.4f}, default burn-in {default_burn_in(params):.0f}")

traj = integrate(mixed_state(), L, IntegrationPolicy(step=0.05, max_time=1500, record_stride=2000))
for t, rho in zip(traj.times, traj.states):
    print(f"t = {t:6.0f}  rho_CC = {rho[2, 2].real:.2e}  rho_AB = {rho[0, 1].real:+.6f}")

print(f"trace drift {traj.trace_drift():.1e}, smallest eigenvalue {traj.min_eigenvalue():.1e}")

# off Raman resonance the exchange coupling makes the generator time periodic
p = params.replace(chi=0.3, detuning_alpha=0.6)
tail = integrate(mixed_state(), build_liouvillian(p), IntegrationPolicy(max_time=1200))
cc = tail.observable("rho_CC")[-400:]
print(f"delta = 0.6 with chi = 0.3: rho_CC keeps oscillating between {cc.min():.3e} and {cc.max():.3e}")
print("mean over the last 20 time units", np.mean(cc).round(6))

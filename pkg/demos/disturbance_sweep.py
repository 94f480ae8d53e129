"""Sweep the channeling factor and compare blowdown outcomes.

Runs the first 1.5e4 s of the default scenario with the channeling factor
swept across its range and tabulates how it changes liquor retention,
discharge tracking, and the energy split -- the sweep stops before the
vessel finishes draining so the differences are still visible.
Demonstrates building scenario variants programmatically instead of via
YAML files.

Run:  python3 demos/disturbance_sweep.py
"""

from dataclasses import replace

import numpy as np

from blowdown import default_scenario, integrate

base = default_scenario()

print(f"{'k_ch':>10} {'final M_fl':>12} {'final C':>9} "
      f"{'max |s_q|':>11} {'E_h':>8} {'eta mean':>9}")

for k_ch in (0.1, 0.3, 0.5, 0.7, 0.9):
    schedule = [(t, replace(inputs, k_ch=k_ch))
                for t, inputs in base.schedule]
    scenario = replace(base, schedule=schedule, t_end=1.5e4)
    traj = integrate(scenario)
    eta = traj.column("eta_h")
    q_p = traj.column("q_p")
    print(f"{k_ch:>10.1f} {traj.column('M_fl')[-1]:>12.1f} "
          f"{traj.column('C')[-1]:>9.4f} "
          f"{np.abs(traj.column('s_q')).max():>11.2e} "
          f"{traj.column('E_h')[-1]:>8.1f} "
          f"{eta[q_p > 0].mean():>9.4f}")

print("\nhigher channeling bypasses the fiber bed: less entrained liquor "
      "leaves with the\ndischarge, so the free-liquor inventory is retained "
      "far longer, while at low\nchanneling the vessel drains completely "
      "within the horizon.")

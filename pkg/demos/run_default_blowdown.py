"""Walk through the shipped default blowdown scenario.

Integrates the full disturbance script -- channeling step at t = 2e4 s,
drainability step at 5e4 s, dilution step at 6e4 s -- then prints a compact
narrative of what the closed loop did and, if matplotlib is importable,
saves a four-panel overview figure next to this script.

Run:  python3 demos/run_default_blowdown.py
"""

import time
from pathlib import Path

import numpy as np

from blowdown import default_scenario, integrate, write_trajectory

scenario = default_scenario()
print(f"horizon {scenario.t_end:.0f} s, logging every "
      f"{scenario.log_interval:.0f} s, method {scenario.method}")

start = time.perf_counter()
traj = integrate(scenario)
print(f"integrated {len(traj)} records in {time.perf_counter() - start:.2f} s")

t = traj.times
C = traj.column("C")
s_q = traj.column("s_q")
e_q = traj.column("e_q")
phi = scenario.parameters.phi_q

print(f"\nconsistency: {C[0]:.4f} at start, {C[-1]:.4f} at end "
      f"(peak {C.max():.4f})")
print(f"sliding variable: max |s_q| = {np.abs(s_q).max():.2e} "
      f"(boundary layer phi_q = {phi:.0e}; "
      f"{100 * np.mean(np.abs(s_q) <= phi):.1f}% of samples inside)")

for b in (2.0e4, 5.0e4, 6.0e4):
    window = (t > b) & (t <= b + 5000.0)
    print(f"after the t = {b:.0f} s event: max |e_q| in the next 5000 s "
          f"= {np.abs(e_q[window]).max():.2e} m^3/s")

print(f"\ncumulative energies: E_h = {traj.column('E_h')[-1]:.1f}, "
      f"E_useful = {traj.column('E_useful')[-1]:.1f}, "
      f"E_elec = {traj.column('E_elec')[-1]:.1f} [head-units m^3]")

out = Path(__file__).with_name("default_trajectory.csv")
write_trajectory(traj, out)
print(f"wrote {out}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the overview figure")
else:
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharex=True)
    axes[0, 0].plot(t, traj.column("M_s"), label="M_s")
    axes[0, 0].plot(t, traj.column("M_fl"), label="M_fl")
    axes[0, 0].set_ylabel("mass [kg]")
    axes[0, 0].legend()
    axes[0, 1].plot(t, traj.column("q_p"), label="q_p")
    axes[0, 1].plot(t, traj.column("q_p_cmd"), "--", label="q_p_cmd")
    axes[0, 1].set_ylabel("flow [m$^3$/s]")
    axes[0, 1].legend()
    axes[1, 0].plot(t, s_q)
    axes[1, 0].axhspan(-phi, phi, alpha=0.2)
    axes[1, 0].set_ylabel("s_q [m$^3$/s]")
    axes[1, 0].set_xlabel("t [s]")
    axes[1, 1].plot(t, traj.column("H0"), label="H0")
    axes[1, 1].plot(t, traj.column("H_static"), label="H_static")
    axes[1, 1].set_ylabel("head [m]")
    axes[1, 1].set_xlabel("t [s]")
    axes[1, 1].legend()
    for ax in axes.flat:
        for b in (2e4, 5e4, 6e4):
            ax.axvline(b, color="k", lw=0.5, alpha=0.4)
    fig.tight_layout()
    target = Path(__file__).with_name("default_blowdown.png")
    fig.savefig(target, dpi=120)
    print(f"wrote {target}")

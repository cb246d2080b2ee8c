"""Pairwise negativity of atoms, electrons and the heralded branch during one pulse.

Run: python demos/entanglement_trace.py [--svg trace.svg]
"""
import argparse

import numpy as np

from heraldw.scans import time_resolved_trace

ap = argparse.ArgumentParser()
ap.add_argument("--svg", help="optional plot (needs matplotlib)")
args = ap.parse_args()

t = time_resolved_trace(n=3, samples=201)
cols = ("area", "p_numeric", "atomic_pair_negativity", "electron_pair_negativity", "yield_numeric")
print("   " + "  ".join(f"{c:>24s}" for c in cols))
for k in range(0, len(t), 20):
    print(f"{k:3d}" + "  ".join(f"{t[c][k]:24.10f}" for c in cols))

y = np.nan_to_num(t["yield_numeric"])
print(f"\nyield peaks at area {t['area'][np.argmax(y)]:.4f}, "
      f"unconditional electron negativity at area {t['area'][np.argmax(t['electron_pair_negativity'])]:.4f}")

if args.svg:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for c in cols[2:]:
        ax.plot(t["area"], t[c], label=c)
    ax.set_xlabel("accumulated area g(t)")
    ax.legend()
    fig.savefig(args.svg)

//! Matplotlib scripts that redraw a run's figure panel from its CSV files.
//! Each script is standalone and reads the tables from its own directory.

use crate::runner::{Job, RunConfig};

const HEADER: &str = r#"import os
import numpy as np
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def load(name):
    return np.genfromtxt(os.path.join(HERE, name), delimiter=",", names=True)

"#;

fn body(job: &Job) -> &'static str {
    match job {
        Job::Dpt(_) => {
            r#"d = load(f"{PREFIX}_trace.csv")
t = d["t_seconds"] * 1e6
levels = [n for n in d.dtype.names if n.startswith("p_")]
fig, (a, b) = plt.subplots(2, 1, sharex=True, figsize=(5, 5))
for n in levels:
    a.plot(t, d[n], label=n)
a.plot(t, d["echo"], "k.", label="echo")
a.set_ylabel("population")
a.legend(fontsize=6, ncol=3)
b.plot(t, d["parity"])
b.set_ylim(-1.05, 1.05)
b.set_xlabel("t (us)")
b.set_ylabel("<parity>")
"#
        }
        Job::Gap(_) => {
            r#"s = load(f"{PREFIX}_spectrogram.csv")
e = load(f"{PREFIX}_estimates.csv")
fig, axes = plt.subplots(1, 2, figsize=(8, 4))
for kind, ax, title in [(0, axes[0], "even-odd"), (1, axes[1], "even-even")]:
    m = s["kind"] == kind
    k = e["kind"] == kind
    if m.any():
        mag = np.log10(np.maximum(s["magnitude"][m], 1e-4))
        ax.scatter(s["h_over_gx"][m], s["freq_over_omega"][m], c=mag, s=4, cmap="gray_r")
        ax.plot(e["h_over_gx"][k], e["oracle_over_omega"][k], "r-", lw=1)
        ok = k & (e["resolved"] == 1)
        ax.plot(e["h_over_gx"][ok], e["gap_over_omega"][ok], "o", mfc="none", ms=4)
        ax.set_ylim(0, 1.3 * max(e["oracle_over_omega"][k].max(), 0.1))
    ax.set_title(title)
    ax.set_xlabel("h / gamma_x")
axes[0].set_ylabel("frequency / Omega")
"#
        }
        Job::Kz(_) => {
            r#"d = load(f"{PREFIX}_populations.csv")
fig, ax = plt.subplots(figsize=(5, 4))
ax.semilogx(d["ramp_speed"], d["ground_population"], "o-")
ax.set_xlabel("ramp speed 2 pi / (Omega T)")
ax.set_ylabel("ground-state population")
"#
        }
        Job::Order(_) => {
            r#"d = load(f"{PREFIX}_distribution.csv")
hs = np.unique(d["h_over_gx"])
ms = np.unique(d["m"])
grid = np.zeros((len(ms), len(hs)))
for i, h in enumerate(hs):
    sel = d["h_over_gx"] == h
    grid[:, i] = d["probability"][sel][np.argsort(d["m"][sel])]
fig, ax = plt.subplots(figsize=(5, 4))
ax.pcolormesh(hs, ms, grid, shading="nearest")
j = ms.max()
r = np.linspace(0, min(1, hs.max()), 200)
ax.plot(r, j * np.sin(np.arccos(r)), "w--")
ax.plot(r, -j * np.sin(np.arccos(r)), "w--")
ax.set_xlabel("h / gamma_x")
ax.set_ylabel("m (J_x eigenvalue)")
"#
        }
        Job::Esqpt(_) => {
            r#"p = load(f"{PREFIX}_pairs.csv")
s = load(f"{PREFIX}_spectrum.csv")
fig, (a, b) = plt.subplots(1, 2, figsize=(8, 4))
a.plot(p["mean_energy"], p["splitting"], "o-")
a.set_xlabel("pair mean energy / Omega")
a.set_ylabel("splitting / Omega")
for sign, mk in [(1, "o"), (-1, "s")]:
    m = s["parity"] == sign
    b.plot(s["n"][m], s["energy"][m], mk, mfc="none")
    b.plot(s["n"][m], s["oracle"][m], "k_")
b.set_xlabel("sector level")
b.set_ylabel("energy / Omega")
"#
        }
        Job::Dos(_) => {
            r#"d = load(f"{PREFIX}_curve.csv")
fig, ax = plt.subplots(figsize=(5, 4))
ax.plot(d["E"], d["rho"], "k-")
if os.path.exists(os.path.join(HERE, f"{PREFIX}_histogram.csv")):
    h = load(f"{PREFIX}_histogram.csv")
    ax.bar(h["e_low"], h["density"], width=h["e_high"] - h["e_low"], align="edge", alpha=0.4)
ax.set_xlabel("E / j")
ax.set_ylabel("density of states")
"#
        }
        Job::Spectrum(_) => {
            r#"d = load(f"{PREFIX}_levels.csv")
fig, ax = plt.subplots(figsize=(5, 4))
for sign, color in [(1, "C0"), (-1, "C3")]:
    m = d["parity"] == sign
    ax.plot(d["h_over_gamma_x"][m], d["energy_over_Omega"][m], ".", ms=2, color=color)
ax.set_xlabel("h / gamma_x")
ax.set_ylabel("E - E_0 (Omega)")
"#
        }
        Job::Surface(_) => {
            r#"d = load(f"{PREFIX}_grid.csv")
th = np.unique(d["theta"])
ph = np.unique(d["phi"])
z = d["energy"].reshape(len(th), len(ph))
fig, ax = plt.subplots(figsize=(6, 3))
ax.pcolormesh(ph, th, z, shading="nearest")
ax.set_xlabel("phi")
ax.set_ylabel("theta")
"#
        }
    }
}

pub fn script(cfg: &RunConfig) -> String {
    format!(
        "{HEADER}PREFIX = {:?}\n\n{}\nplt.tight_layout()\nplt.savefig(os.path.join(HERE, f\"{{PREFIX}}.png\"), dpi=150)\n",
        cfg.prefix,
        body(&cfg.job)
    )
}

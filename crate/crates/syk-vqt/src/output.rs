//! File emission: records, summaries, plot data, TFD maps, digests.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! repeated run with the same config produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{OutputFormat, RunConfig};
use crate::engine::{EnsembleReport, PointRecord, SummaryRow};
use crate::error::{Error, Result};
use crate::syk::{sample_instance, SykParams};
use crate::tfd::FidelityMap;

pub fn records_csv(points: &[PointRecord]) -> String {
    let mut out = String::from(
        "instance,seed,beta,loss,energy,entropy,purity,fidelity,layers1,layers2,cnots,\
         n_params1,n_params2,iterations,converged\n",
    );
    for p in points {
        let r = &p.result;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.instance_index,
            p.seed,
            p.beta,
            r.loss,
            r.energy,
            r.shannon_entropy,
            r.purity,
            r.fidelity,
            r.layers1,
            r.layers2,
            r.cnot_count,
            r.n_params1,
            r.n_params2,
            r.iterations,
            r.converged
        );
    }
    out
}

pub fn records_json_lines(points: &[PointRecord]) -> Result<String> {
    let mut out = String::new();
    for p in points {
        out.push_str(&serde_json::to_string(p).map_err(|e| Error::Parse(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_records_json_lines(text: &str) -> Result<Vec<PointRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Exact-ensemble bands (mean, +-1 sigma, +-2 sigma) and variational
/// mean +- 1 sigma per beta; one row per grid point.
pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("beta");
    for q in ["free_energy", "energy", "entropy", "purity"] {
        let _ = write!(
            out,
            ",exact_{q}_mean,exact_{q}_lo1,exact_{q}_hi1,exact_{q}_lo2,exact_{q}_hi2,var_{q}_mean,var_{q}_lo1,var_{q}_hi1"
        );
    }
    out.push_str(",mean_fidelity,mean_layers1,mean_layers2,mean_cnots,mean_ground_energy\n");
    for row in summary {
        let _ = write!(out, "{}", row.beta);
        for (e, v) in [
            (&row.exact_free_energy, &row.var_free_energy),
            (&row.exact_energy, &row.var_energy),
            (&row.exact_entropy, &row.var_entropy),
            (&row.exact_purity, &row.var_purity),
        ] {
            let _ = write!(
                out,
                ",{},{},{},{},{},{},{},{}",
                e.mean,
                e.mean - e.std,
                e.mean + e.std,
                e.mean - 2.0 * e.std,
                e.mean + 2.0 * e.std,
                v.mean,
                v.mean - v.std,
                v.mean + v.std
            );
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{}",
            row.mean_fidelity, row.mean_layers1, row.mean_layers2, row.mean_cnots, row.mean_ground_energy
        );
    }
    out
}

/// Heatmap rows (mu, beta, fidelity) plus a 0/1 column marking the 90%
/// fidelity region.
pub fn tfd_map_csv(map: &FidelityMap) -> String {
    let mut out = String::from("mu,beta,fidelity,above_0.9\n");
    for p in &map.points {
        let _ = writeln!(out, "{},{},{},{}", p.mu, p.beta, p.fidelity, u8::from(p.fidelity >= 0.9));
    }
    out
}

pub fn tfd_ridge_csv(map: &FidelityMap) -> String {
    let mut out = String::from("mu,best_beta,best_temperature,best_fidelity\n");
    for &(mu, beta, f) in &map.ridge {
        let _ = writeln!(out, "{},{},{},{}", mu, beta, 1.0 / beta, f);
    }
    out
}

/// Python script that renders the four-panel summary figure from
/// `summary.csv`. Headless backend; no GUI.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Four-panel plot (F, <H>, S, P vs beta) from summary.csv."""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "summary.csv"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
beta = [float(r["beta"]) for r in rows]
col = lambda name: [float(r[name]) for r in rows]

fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True)
panels = [
    ("free_energy", "Free energy"),
    ("energy", "Energy"),
    ("entropy", "Entropy"),
    ("purity", "Purity"),
]
for ax, (q, label) in zip(axes.flat, panels):
    ax.fill_between(beta, col(f"exact_{q}_lo2"), col(f"exact_{q}_hi2"), alpha=0.15, label="exact 2 sigma")
    ax.fill_between(beta, col(f"exact_{q}_lo1"), col(f"exact_{q}_hi1"), alpha=0.3, label="exact 1 sigma")
    ax.plot(beta, col(f"exact_{q}_mean"), "k-", lw=1, label="exact mean")
    ax.errorbar(
        beta,
        col(f"var_{q}_mean"),
        yerr=[
            [m - lo for m, lo in zip(col(f"var_{q}_mean"), col(f"var_{q}_lo1"))],
            [hi - m for m, hi in zip(col(f"var_{q}_mean"), col(f"var_{q}_hi1"))],
        ],
        fmt="o",
        ms=3,
        label="variational",
    )
    if q == "energy":
        ax.plot(beta, col("mean_ground_energy"), "k--", lw=1, label="ground state")
    ax.set_ylabel(label)
axes[1][0].set_xlabel("beta")
axes[1][1].set_xlabel("beta")
axes[0][0].legend(fontsize=7)
fig.tight_layout()
fig.savefig("summary.png", dpi=160)
print("wrote summary.png")
"#;

pub const TFD_PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Fidelity heatmap over (mu, T) from tfd_map.csv, with the 90% contour."""
import csv
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "tfd_map.csv"
cells = defaultdict(dict)
with open(path) as fh:
    for r in csv.DictReader(fh):
        cells[float(r["mu"])][1.0 / float(r["beta"])] = float(r["fidelity"])
mus = sorted(cells)
temps = sorted(next(iter(cells.values())))
grid = [[cells[m][t] for m in mus] for t in temps]

fig, ax = plt.subplots(figsize=(6, 5))
im = ax.pcolormesh(mus, temps, grid, shading="nearest", vmin=0.5, vmax=1.0)
ax.contour(mus, temps, grid, levels=[0.9], colors="w")
ax.plot(mus, mus, "r--", lw=1, label="T = mu")
ax.set_xlabel("mu")
ax.set_ylabel("T")
ax.legend()
fig.colorbar(im, label="fidelity")
fig.tight_layout()
fig.savefig("tfd_map.png", dpi=160)
print("wrote tfd_map.png")
"#;

/// Write every artifact of a thermal run into the config's output directory.
pub fn write_thermal_outputs(config: &RunConfig, report: &EnsembleReport) -> Result<()> {
    if report.points.is_empty() {
        return Err(Error::InvalidParameter("no records to write".into()));
    }
    let dir = config.resolved_out_dir();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("records.csv"), records_csv(&report.points))?;
    if config.format == OutputFormat::JsonLines {
        fs::write(dir.join("records.jsonl"), records_json_lines(&report.points)?)?;
    }
    fs::write(dir.join("summary.csv"), summary_csv(&report.summary))?;
    fs::write(dir.join("plot_summary.py"), PLOT_SCRIPT)?;
    fs::write(
        dir.join("config.resolved.json"),
        serde_json::to_string_pretty(config).map_err(|e| Error::Parse(e.to_string()))? + "\n",
    )?;
    write_digests(&dir, config)?;
    if !report.failures.is_empty() {
        fs::write(dir.join("failures.txt"), report.failures.join("\n") + "\n")?;
    }
    Ok(())
}

/// One digest file per instance: couplings as "i j k l value" lines, enough
/// to rebuild the Hamiltonian without the RNG.
fn write_digests(dir: &Path, config: &RunConfig) -> Result<()> {
    let digest_dir = dir.join("digests");
    fs::create_dir_all(&digest_dir)?;
    for (idx, &seed) in config.instance_seeds.iter().enumerate() {
        let params = SykParams { seed, ..config.syk_params() };
        let inst = sample_instance(&params)?;
        fs::write(digest_dir.join(format!("instance_{idx:03}.txt")), inst.digest())?;
    }
    Ok(())
}

pub fn write_tfd_outputs(config: &RunConfig, map: &FidelityMap) -> Result<()> {
    let dir = config.resolved_out_dir();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("tfd_map.csv"), tfd_map_csv(map))?;
    fs::write(dir.join("tfd_ridge.csv"), tfd_ridge_csv(map))?;
    fs::write(dir.join("plot_tfd.py"), TFD_PLOT_SCRIPT)?;
    fs::write(
        dir.join("config.resolved.json"),
        serde_json::to_string_pretty(config).map_err(|e| Error::Parse(e.to_string()))? + "\n",
    )?;
    Ok(())
}

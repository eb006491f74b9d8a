use std::fmt::Write as _;
use std::io::Write;

use super::{RateFit, RecursionTrace};
use crate::Result;

/// Eigenvalue columns are written only for spectra up to this size.
pub const MAX_LAMBDA_COLUMNS: usize = 64;

/// CSV with columns `t, mu_t` and, when recorded and `n <= 64`,
/// `lambda_1..lambda_n`. Rows use the `t = 0` convention (`N₀ = M̄`).
pub fn write_recursion_csv<W: Write>(trace: &RecursionTrace, w: W) -> Result<()> {
    let lambdas = trace
        .lambdas
        .as_ref()
        .filter(|_| trace.rho.len() <= MAX_LAMBDA_COLUMNS);
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string(), "mu_t".to_string()];
    if lambdas.is_some() {
        header.extend((1..=trace.rho.len()).map(|k| format!("lambda_{k}")));
    }
    out.write_record(&header)?;
    for (t, mu) in trace.mu.iter().enumerate() {
        let mut row = vec![t.to_string(), mu.to_string()];
        if let Some(l) = lambdas {
            row.extend(l[t].iter().map(f64::to_string));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// A standalone matplotlib script that plots `mu_t` (and any `lambda_k`
/// columns) from `csv_path` on log-log axes, with the step index shifted to
/// start at 1, and overlays the fitted power law if given.
pub fn plot_script(csv_path: &str, fit: Option<&RateFit>, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "#!/usr/bin/env python3");
    let _ = writeln!(s, "import csv");
    let _ = writeln!(s, "import matplotlib.pyplot as plt");
    let _ = writeln!(s);
    let _ = writeln!(s, "with open({csv_path:?}) as f:");
    let _ = writeln!(s, "    rows = list(csv.DictReader(f))");
    let _ = writeln!(s, "t = [int(r['t']) + 1 for r in rows]");
    let _ = writeln!(s, "cols = [c for c in rows[0] if c.startswith('lambda_')]");
    let _ = writeln!(s, "fig, ax = plt.subplots(figsize=(6, 4))");
    let _ = writeln!(s, "for c in cols:");
    let _ = writeln!(s, "    ys = [float(r[c]) for r in rows]");
    let _ = writeln!(
        s,
        "    ax.plot([a for a, y in zip(t, ys) if y > 0], [y for y in ys if y > 0], lw=0.8, label=c)"
    );
    let _ = writeln!(s, "mu = [float(r['mu_t']) for r in rows]");
    let _ = writeln!(s, "ax.plot(t, mu, 'k-', lw=1.5, label='max eigenvalue')");
    if let Some(f) = fit {
        let _ = writeln!(s, "lo, hi = {}, {}", f.window.0, f.window.1);
        let _ = writeln!(s, "slope, intercept = {:?}, {:?}", f.slope, f.intercept);
        let _ = writeln!(s, "import math");
        let _ = writeln!(s, "xs = [a for a in t if lo <= a - 1 <= hi]");
        let _ = writeln!(
            s,
            "ax.plot(xs, [math.exp(intercept) * (a - 1) ** slope for a in xs], 'r:', lw=2, label=f'fit slope {{slope:.3f}}')"
        );
    }
    let _ = writeln!(s, "ax.set_xscale('log')");
    let _ = writeln!(s, "ax.set_yscale('log')");
    let _ = writeln!(s, "ax.set_xlabel('t')");
    let _ = writeln!(s, "ax.set_title({title:?})");
    let _ = writeln!(s, "if len(cols) <= 8:");
    let _ = writeln!(s, "    ax.legend(fontsize=7)");
    let _ = writeln!(s, "fig.tight_layout()");
    let _ = writeln!(s, "fig.savefig({:?}, dpi=150)", format!("{csv_path}.png"));
    s
}

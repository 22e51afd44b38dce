//! gnuplot script generation for summary CSVs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::record::SummaryRow;

/// Which summary column an experiment varies along the x axis.
fn x_axis(experiment: &str) -> (&'static str, usize, bool) {
    // (label, 1-based CSV column, log scale)
    match experiment {
        "sweep_m" => ("m", 5, false),
        "sweep_d" => ("d", 4, false),
        "sweep_k" => ("k", 6, false),
        "sweep_gamma" => ("gamma", 7, true),
        _ => ("n", 3, true),
    }
}

/// A script plotting median error and median rescaled error from the
/// summary CSV at `summary_path` into `png_path`, one curve per
/// (experiment, algorithm, m). Paths are used as given.
pub fn gnuplot_script(summary_path: &str, png_path: &str, rows: &[SummaryRow]) -> String {
    let series: BTreeSet<(String, String, usize)> = rows
        .iter()
        .map(|r| (r.experiment.clone(), r.algorithm.to_string(), r.m))
        .collect();
    let experiment = rows.first().map(|r| r.experiment.as_str()).unwrap_or("");
    let (label, col, log) = x_axis(experiment);

    let mut s = String::new();
    let _ = writeln!(s, "# generated by csl; run with: gnuplot <this file>");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 1200,480");
    let _ = writeln!(s, "set output '{png_path}'");
    let _ = writeln!(s, "set multiplot layout 1,2");
    if log {
        let _ = writeln!(s, "set logscale x");
    }
    let _ = writeln!(s, "set xlabel '{label}'");
    let _ = writeln!(s, "set key top right");
    for (title, ycol) in [("median error", 9), ("median sqrt(n) x error", 10)] {
        let _ = writeln!(s, "set ylabel '{title}'");
        let plots: Vec<String> = series
            .iter()
            .map(|(e, a, m)| {
                format!(
                    "'{summary_path}' skip 1 using (strcol(1) eq '{e}' && strcol(2) eq '{a}' && $5=={m} ? ${col} : 1/0):{ycol} with linespoints title '{e} {a} m={m}'"
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    s
}

use clap::Args;
use serde::Serialize;
use sigmap::heuristics::Signature;
use sigmap::montecarlo::{self as mc, CompareOptions, DEFAULT_SIGMA};

use crate::output::{csv_table, Report};
use crate::{cap, Failure};

pub const MAX_TRIALS: u64 = 1_000_000_000;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub r1: usize,
    #[arg(long)]
    pub r2: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Largest |z| accepted for any cell.
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Trials a `(k, ρ)` cell needs before its conditional `s`-distribution is compared.
    #[arg(long, default_value_t = 10_000)]
    pub min_conditional: u64,
}

#[derive(Debug, Serialize)]
pub struct CellRow {
    pub comparison: String,
    pub label: String,
    pub count: u64,
    pub empirical: f64,
    pub exact: f64,
    pub z: f64,
}

#[derive(Debug, Serialize)]
pub struct ComparisonOut {
    pub name: String,
    pub passed: bool,
    pub max_abs_deviation: f64,
    pub max_abs_z: f64,
    pub cells: Vec<CellRow>,
}

#[derive(Debug, Serialize)]
pub struct MeanOut {
    pub empirical: f64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub r1: usize,
    pub r2: usize,
    pub trials: u64,
    pub seed: u64,
    pub sigma: f64,
    pub violations: u64,
    pub mean_two_pow_rho: MeanOut,
    pub comparisons: Vec<ComparisonOut>,
    #[serde(skip)]
    passed: bool,
}

pub fn run(args: &SimulateArgs, seed: u64) -> Result<SimulateReport, Failure> {
    cap("--trials", args.trials, MAX_TRIALS)?;
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    if !(args.sigma > 0.0) {
        return Err(Failure::Usage(format!("--sigma must be positive, got {}", args.sigma)));
    }
    let sig = Signature::new(args.r1, args.r2)?;
    let opts = CompareOptions { sigma: args.sigma, min_conditional: args.min_conditional.max(1) };
    let rep = mc::simulate(sig, args.trials, seed, opts)?;
    let comparisons = rep
        .comparisons
        .iter()
        .map(|c| ComparisonOut {
            name: c.name.clone(),
            passed: c.passed(),
            max_abs_deviation: c.max_abs_deviation,
            max_abs_z: c.max_abs_z,
            cells: c
                .cells
                .iter()
                .map(|x| CellRow {
                    comparison: c.name.clone(),
                    label: x.label.clone(),
                    count: x.count,
                    empirical: x.empirical,
                    exact: x.exact,
                    z: x.z,
                })
                .collect(),
        })
        .collect();
    let (empirical, expected, z) = rep.mean_two_pow_rho;
    Ok(SimulateReport {
        r1: args.r1,
        r2: args.r2,
        trials: args.trials,
        seed,
        sigma: args.sigma,
        violations: rep.counts.violations,
        mean_two_pow_rho: MeanOut { empirical, expected, z },
        comparisons,
        passed: rep.passed(),
    })
}

impl Report for SimulateReport {
    fn passed(&self) -> bool {
        self.passed
    }

    fn text(&self) -> String {
        let mut out = format!(
            "simulate ({},{}) trials {} seed {} sigma {}\n",
            self.r1, self.r2, self.trials, self.seed, self.sigma
        );
        let m = &self.mean_two_pow_rho;
        out += &format!("mean 2^rho {:.6} expected {:.6} z {:+.2}\n", m.empirical, m.expected, m.z);
        for c in &self.comparisons {
            out += &format!(
                "{}: max |dev| {:.2e} max |z| {:.2} {}\n",
                c.name,
                c.max_abs_deviation,
                c.max_abs_z,
                if c.passed { "PASS" } else { "FAIL" }
            );
            for x in &c.cells {
                out += &format!(
                    "  {:<10} {:>10} {:.6} exact {:.6} z {:+.2}\n",
                    x.label, x.count, x.empirical, x.exact, x.z
                );
            }
        }
        out += &format!("overall: {}\n", if self.passed { "PASS" } else { "FAIL" });
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        let rows: Vec<&CellRow> = self.comparisons.iter().flat_map(|c| &c.cells).collect();
        csv_table(&["comparison", "label", "count", "empirical", "exact", "z"], &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(trials: u64) -> SimulateArgs {
        SimulateArgs { r1: 3, r2: 0, trials, sigma: 4.0, min_conditional: 10_000 }
    }

    #[test]
    fn small_run_passes_and_repeats() {
        let a = run(&args(20_000), 7).unwrap();
        let b = run(&args(20_000), 7).unwrap();
        assert!(a.passed());
        assert_eq!(a.text(), b.text());
        assert!(a.text().starts_with("simulate (3,0) trials 20000 seed 7"));
    }

    #[test]
    fn limits() {
        assert!(matches!(run(&args(MAX_TRIALS + 1), 1), Err(Failure::Resource(_))));
        assert!(matches!(run(&args(0), 1), Err(Failure::Usage(_))));
    }
}

use clap::{Args, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use sigmap::heuristics as h;

use crate::output::{csv_table, Report};
use crate::{cap, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// `Σ q^k p̃(k)` identity and the WZ recurrence with its certificate.
    Wz,
    /// Random subspace intersection formula against exhaustive counts over F_2.
    Subspace,
    All,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Field sizes for the WZ suite.
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 4])]
    pub q: Vec<u64>,
    #[arg(long, default_value_t = 8)]
    pub max_m: usize,
    #[arg(long, default_value_t = 4)]
    pub max_r2: usize,
    /// Largest ambient dimension for the exhaustive subspace suite.
    #[arg(long, default_value_t = 5)]
    pub max_subspace_m: usize,
}

#[derive(Debug, Serialize)]
pub struct Instance {
    pub suite: &'static str,
    pub instance: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct IdentityReport {
    pub instances: Vec<Instance>,
}

fn wz(args: &IdentityArgs, out: &mut Vec<Instance>) -> Result<(), Failure> {
    cap("--max-m", args.max_m as u64, 40)?;
    cap("--max-r2", args.max_r2 as u64, 40)?;
    for &q in &args.q {
        if q < 2 {
            return Err(Failure::Usage(format!("--q must be at least 2, got {q}")));
        }
        let qr = BigRational::from_integer(q.into());
        for m in 0..=args.max_m {
            for r2 in 0..=args.max_r2 {
                let w = h::pksum_wz_check(&qr, m, r2)?;
                out.push(Instance {
                    suite: "wz",
                    instance: format!("q={q} m={m} r2={r2}"),
                    passed: w.passed(),
                    detail: format!(
                        "sum {} vs {}; recurrence {}",
                        w.sum_lhs,
                        w.sum_rhs,
                        if w.recurrence_holds { "holds" } else { "fails" }
                    ),
                });
            }
        }
    }
    Ok(())
}

fn subspace(args: &IdentityArgs, out: &mut Vec<Instance>) -> Result<(), Failure> {
    cap("--max-subspace-m", args.max_subspace_m as u64, 8)?;
    for m in 1..=args.max_subspace_m {
        for r in 0..m {
            for t in 1..=m {
                let counts = h::random_subspace_counts(m, r, t)?;
                let formula: Vec<BigRational> = (0..counts.len())
                    .map(|s| h::random_subspace_prob(2, m, r, t, s).unwrap_or_else(|_| BigRational::zero()))
                    .collect();
                let shown: Vec<String> = formula.iter().map(|p| p.to_string()).collect();
                out.push(Instance {
                    suite: "subspace",
                    instance: format!("m={m} r={r} t={t}"),
                    passed: counts == formula,
                    detail: format!("P(s') = {}", shown.join(" ")),
                });
            }
        }
    }
    Ok(())
}

pub fn run(args: &IdentityArgs) -> Result<IdentityReport, Failure> {
    let mut instances = Vec::new();
    if matches!(args.suite, Suite::Wz | Suite::All) {
        wz(args, &mut instances)?;
    }
    if matches!(args.suite, Suite::Subspace | Suite::All) {
        subspace(args, &mut instances)?;
    }
    Ok(IdentityReport { instances })
}

impl Report for IdentityReport {
    fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.passed)
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for suite in ["wz", "subspace"] {
            let all: Vec<&Instance> = self.instances.iter().filter(|i| i.suite == suite).collect();
            if all.is_empty() {
                continue;
            }
            let failed: Vec<&&Instance> = all.iter().filter(|i| !i.passed).collect();
            out += &format!("{suite}: {} instances, {} failures\n", all.len(), failed.len());
            for f in failed {
                out += &format!("  FAIL {}: {}\n", f.instance, f.detail);
            }
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_table(&["suite", "instance", "passed", "detail"], &self.instances)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(suite: Suite) -> IdentityArgs {
        IdentityArgs { suite, q: vec![2], max_m: 2, max_r2: 1, max_subspace_m: 3 }
    }

    #[test]
    fn small_suites_pass() {
        let r = run(&args(Suite::All)).unwrap();
        assert!(r.passed());
        assert_eq!(r.text(), "wz: 6 instances, 0 failures\nsubspace: 14 instances, 0 failures\n");
        let split = r.instances.iter().find(|i| i.instance == "m=3 r=1 t=2").unwrap();
        assert_eq!(split.detail, "P(s') = 2/3 1/3 0");
    }

    #[test]
    fn bad_q_is_usage() {
        let a = IdentityArgs { q: vec![1], ..args(Suite::Wz) };
        assert!(matches!(run(&a), Err(Failure::Usage(_))));
    }
}

use clap::{Args, ValueEnum};
use num_traits::Zero;
use serde::Serialize;
use sigmap::heuristics::{self as h, Signature, TruncatedReal};

use crate::output::{csv_table, Report};
use crate::Failure;

/// Signatures with `n = 3, 5, 7`, in the order the tables list them.
pub const DEFAULT_SIGNATURES: [(usize, usize); 9] =
    [(3, 0), (1, 1), (5, 0), (3, 1), (1, 2), (7, 0), (5, 1), (3, 2), (1, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Distribution of `k = ρ+ - ρ`.
    K,
    /// Distribution of the narrow 2-rank `ρ+`.
    RhoPlus,
    /// Moments of `|C+[2]|`.
    Moments,
    /// Distribution of the unit signature rank `s`.
    Sigrank,
    /// Probability that the class group is a direct summand of the narrow one.
    Split,
    All,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,
    /// Number of real places; omit both `--r1` and `--r2` for every degree 3, 5, 7 signature.
    #[arg(long, requires = "r2")]
    pub r1: Option<usize>,
    #[arg(long, requires = "r1")]
    pub r2: Option<usize>,
    /// Largest `ρ+` listed in the narrow 2-rank table.
    #[arg(long, default_value_t = 2)]
    pub max_rho_plus: usize,
    /// Largest moment listed.
    #[arg(long, default_value_t = 4)]
    pub max_moment: usize,
    /// Decimal places for truncated cells (never more than are certified).
    #[arg(long, default_value_t = 6)]
    pub digits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub table: &'static str,
    pub r1: usize,
    pub r2: usize,
    pub index: usize,
    /// Exact fraction (class probabilities share one denominator per row), or
    /// a decimal when `err` is present.
    pub value: String,
    pub err: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TablesReport {
    pub eps: f64,
    pub cells: Vec<Cell>,
}

const TABLES: [(Which, &str, &str); 5] = [
    (Which::K, "k", "P(rho+ - rho = k), k = 0, 1, ..."),
    (Which::RhoPlus, "rho_plus", "P(rho+ = j), j = 0, 1, ..."),
    (Which::Moments, "moment", "E[|C+[2]|^t], t = 1, 2, ..."),
    (Which::Sigrank, "sigrank", "P(unit signature rank = s), s = 1, ..., r1"),
    (Which::Split, "split", "P(C is a direct summand of C+)"),
];

fn exact(table: &'static str, sig: Signature, index: usize, v: &num_rational::BigRational) -> Cell {
    Cell { table, r1: sig.r1, r2: sig.r2, index, value: v.to_string(), err: None }
}

/// Decimal rendering that never shows uncertified digits; cells whose error
/// is zero are rendered as exact fractions.
pub fn truncated(table: &'static str, sig: Signature, index: usize, t: &TruncatedReal, digits: usize) -> Cell {
    if t.err.is_zero() {
        return exact(table, sig, index, &t.value);
    }
    let (v, e) = (t.to_f64(), t.err_f64());
    let value = if v > 0.0 && v < 1e-4 && e < v / 100.0 {
        format!("{v:.2e}")
    } else {
        t.to_decimal(digits.min(t.certified_decimals(digits)))
    };
    Cell { table, r1: sig.r1, r2: sig.r2, index, value, err: Some(format!("{e:.1e}")) }
}

fn cells_for(which: Which, sig: Signature, args: &TablesArgs, eps: f64) -> Result<Vec<Cell>, Failure> {
    let d = args.digits;
    Ok(match which {
        Which::K => {
            let (nums, den) = h::common_denominator(&h::p_k_all(sig));
            nums.iter()
                .enumerate()
                .map(|(k, n)| {
                    let value = if den == 1.into() { n.to_string() } else { format!("{n}/{den}") };
                    Cell { table: "k", r1: sig.r1, r2: sig.r2, index: k, value, err: None }
                })
                .collect()
        }
        Which::RhoPlus => (0..=args.max_rho_plus)
            .map(|j| Ok(truncated("rho_plus", sig, j, &h::eta_plus(sig, j, eps)?, d)))
            .collect::<Result<_, sigmap::Error>>()?,
        Which::Moments => (1..=args.max_moment)
            .map(|t| Ok(exact("moment", sig, t, &h::moment(sig, t)?)))
            .collect::<Result<_, sigmap::Error>>()?,
        Which::Sigrank => (1..=sig.r1)
            .map(|s| Ok(truncated("sigrank", sig, s, &h::sigrank(sig, s, eps)?, d)))
            .collect::<Result<_, sigmap::Error>>()?,
        Which::Split => vec![truncated("split", sig, 0, &h::split_prob(sig, eps)?, d)],
        Which::All => unreachable!(),
    })
}

pub fn run(args: &TablesArgs, eps: f64) -> Result<TablesReport, Failure> {
    let sigs: Vec<Signature> = match (args.r1, args.r2) {
        (Some(r1), Some(r2)) => vec![Signature::new(r1, r2)?],
        _ => DEFAULT_SIGNATURES.iter().map(|&(a, b)| Signature::new(a, b).unwrap()).collect(),
    };
    if args.digits > 30 {
        return Err(Failure::Usage(format!("--digits {} is above 30", args.digits)));
    }
    let mut cells = Vec::new();
    for (which, _, _) in TABLES {
        if args.which != Which::All && args.which != which {
            continue;
        }
        for &sig in &sigs {
            cells.extend(cells_for(which, sig, args, eps)?);
        }
    }
    Ok(TablesReport { eps, cells })
}

fn cell_text(c: &Cell) -> String {
    match &c.err {
        None => c.value.clone(),
        Some(e) => format!("{}±{e}", c.value),
    }
}

impl Report for TablesReport {
    fn text(&self) -> String {
        let mut out = String::new();
        for (_, key, title) in TABLES {
            let rows: Vec<&Cell> = self.cells.iter().filter(|c| c.table == key).collect();
            if rows.is_empty() {
                continue;
            }
            out += &format!("# {title}\n");
            let mut i = 0;
            while i < rows.len() {
                let (r1, r2) = (rows[i].r1, rows[i].r2);
                let line: Vec<String> =
                    rows[i..].iter().take_while(|c| (c.r1, c.r2) == (r1, r2)).map(|c| cell_text(c)).collect();
                i += line.len();
                out += &format!("({r1},{r2})  {}\n", line.join(" "));
            }
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_table(&["table", "r1", "r2", "index", "value", "err"], &self.cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(which: Which) -> TablesArgs {
        TablesArgs { which, r1: Some(5), r2: Some(0), max_rho_plus: 2, max_moment: 4, digits: 6 }
    }

    #[test]
    fn class_row_is_exact() {
        let r = run(&args(Which::K), 1e-9).unwrap();
        assert_eq!(r.text(), "# P(rho+ - rho = k), k = 0, 1, ...\n(5,0)  16/51 30/51 5/51\n");
    }

    #[test]
    fn truncated_cells_carry_errors() {
        let r = run(&args(Which::RhoPlus), 1e-9).unwrap();
        assert_eq!(r.cells[0].value, "0.294906");
        assert!(r.cells.iter().all(|c| c.err.is_some()));
        let tiny = run(&args(Which::Sigrank), 1e-12).unwrap();
        assert_eq!(tiny.cells[0].value, "1.88e-7");
    }

    #[test]
    fn exactly_one_is_a_fraction() {
        let a = TablesArgs { r1: Some(1), r2: Some(2), ..args(Which::Split) };
        let r = run(&a, 1e-9).unwrap();
        assert_eq!((r.cells[0].value.as_str(), r.cells[0].err.as_deref()), ("1", None));
    }

    #[test]
    fn even_degree_is_rejected() {
        let a = TablesArgs { r1: Some(2), r2: Some(0), ..args(Which::K) };
        assert!(matches!(run(&a, 1e-9), Err(Failure::Usage(_))));
    }
}

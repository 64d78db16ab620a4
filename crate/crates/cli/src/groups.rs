use clap::{Args, ValueEnum};
use serde::Serialize;
use sigmap::isotropic::{self as iso, OrthoSum, BRUTE_LIMIT};
use sigmap::symspace::{self, SpaceSpec, SpaceType};

use crate::output::{csv_table, Report};
use crate::{cap, Failure};

#[derive(Debug, Args)]
pub struct MassArgs {
    /// Left summand, e.g. `nonalt:3` or `alt:4`.
    #[arg(long, requires = "right", conflicts_with = "all_up_to")]
    pub left: Option<SpaceSpec>,
    #[arg(long, requires = "left")]
    pub right: Option<SpaceSpec>,
    /// Check every same-parity pair with `n + n'` at most this.
    #[arg(long)]
    pub all_up_to: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
}

#[derive(Debug, Serialize)]
pub struct MassRow {
    pub left: String,
    pub right: String,
    pub orbits: String,
    pub orbit_sum: String,
    pub brute: Option<u64>,
    pub formula: String,
    pub ok: bool,
    #[serde(skip)]
    line: String,
}

#[derive(Debug, Serialize)]
pub struct MassReport {
    pub q: u64,
    pub pairs: Vec<MassRow>,
}

pub fn mass(args: &MassArgs) -> Result<MassReport, Failure> {
    let pairs = match (args.left, args.right, args.all_up_to) {
        (Some(l), Some(r), _) => vec![(l, r)],
        (_, _, Some(n)) => {
            cap("--all-up-to", n as u64, 2 * BRUTE_LIMIT as u64)?;
            iso::all_type_pairs(n)
        }
        _ => return Err(Failure::Usage("give --left and --right, or --all-up-to".into())),
    };
    let mut rows = Vec::new();
    for (l, r) in pairs {
        let m = iso::mass_check(l, r, args.q)?;
        let orbits: Vec<String> = m.orbits.iter().map(|(_, o)| o.to_string()).collect();
        rows.push(MassRow {
            left: l.to_string(),
            right: r.to_string(),
            orbits: orbits.join("+"),
            orbit_sum: m.orbit_sum.to_string(),
            brute: m.brute,
            formula: m.formula.to_string(),
            ok: m.ok(),
            line: m.to_string(),
        });
    }
    Ok(MassReport { q: args.q, pairs: rows })
}

impl Report for MassReport {
    fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.ok)
    }

    fn text(&self) -> String {
        if let [one] = self.pairs.as_slice() {
            return one.line.clone();
        }
        let mut out: String =
            self.pairs.iter().map(|p| format!("{} + {}: {}\n", p.left, p.right, p.line)).collect();
        let bad = self.pairs.iter().filter(|p| !p.ok).count();
        out += &format!("{} pairs at q = {}, {bad} mismatches\n", self.pairs.len(), self.q);
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_table(&["left", "right", "orbits", "orbit_sum", "brute", "formula", "ok"], &self.pairs)
    }
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    #[arg(long)]
    pub left: SpaceSpec,
    #[arg(long)]
    pub right: SpaceSpec,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    /// Recount each stabilizer over `Aut(W) × Aut(W')` (q = 2 only).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Serialize)]
pub struct ClassRow {
    pub label: String,
    pub k: usize,
    pub k_prime: usize,
    pub wcan_in_u: bool,
    pub wcan_in_u_prime: bool,
    pub stab: String,
    pub orbit: String,
    pub brute_stab: Option<u64>,
    /// Rows of a representative subspace of `W ⊥ W'` at q = 2.
    pub representative: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassReport {
    pub left: String,
    pub right: String,
    pub q: u64,
    pub total: String,
    pub classes: Vec<ClassRow>,
}

#[derive(Serialize)]
struct ClassCsvRow<'a> {
    label: &'a str,
    k: usize,
    k_prime: usize,
    wcan_in_u: bool,
    wcan_in_u_prime: bool,
    stab: &'a str,
    orbit: &'a str,
    brute_stab: Option<u64>,
    representative: String,
}

pub fn classes(args: &ClassArgs) -> Result<ClassReport, Failure> {
    if args.verify && args.q != 2 {
        return Err(Failure::Usage("--verify is only available at q = 2".into()));
    }
    let labels = iso::class_labels(args.left, args.right)?;
    let vs = OrthoSum::standard(args.left, args.right)?;
    let mut rows = Vec::new();
    let mut total = None;
    for label in labels {
        let st = iso::orbit_stats(&label, args.q)?;
        let rep = iso::representative_in(&vs, &label)?;
        let brute_stab = if args.verify { Some(iso::brute_stabilizer_order(&vs, &rep)?) } else { None };
        total = Some(st.total.to_string());
        rows.push(ClassRow {
            label: label.to_string(),
            k: label.k,
            k_prime: label.kp,
            wcan_in_u: label.wcan_in_u,
            wcan_in_u_prime: label.wcan_in_up,
            stab: st.stab.to_string(),
            orbit: st.orbit.to_string(),
            brute_stab,
            representative: rep.basis_vectors().iter().map(|v| v.to_string()).collect(),
        });
    }
    Ok(ClassReport {
        left: args.left.to_string(),
        right: args.right.to_string(),
        q: args.q,
        total: total.unwrap_or_else(|| "0".into()),
        classes: rows,
    })
}

impl Report for ClassReport {
    fn passed(&self) -> bool {
        self.classes.iter().all(|c| c.brute_stab.is_none_or(|b| b.to_string() == c.stab))
    }

    fn text(&self) -> String {
        let mut out = format!(
            "{} + {} (q = {}): {} classes, {} maximal totally isotropic subspaces\n",
            self.left,
            self.right,
            self.q,
            self.classes.len(),
            self.total
        );
        for c in &self.classes {
            out += &format!("{}\n  stabilizer {}  orbit {}", c.label, c.stab, c.orbit);
            if let Some(b) = c.brute_stab {
                out += &format!("  brute {b} {}", if b.to_string() == c.stab { "OK" } else { "MISMATCH" });
            }
            out.push('\n');
            for r in &c.representative {
                out += &format!("    {r}\n");
            }
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        let rows: Vec<ClassCsvRow> = self
            .classes
            .iter()
            .map(|c| ClassCsvRow {
                label: &c.label,
                k: c.k,
                k_prime: c.k_prime,
                wcan_in_u: c.wcan_in_u,
                wcan_in_u_prime: c.wcan_in_u_prime,
                stab: &c.stab,
                orbit: &c.orbit,
                brute_stab: c.brute_stab,
                representative: c.representative.join(" "),
            })
            .collect();
        csv_table(
            &["label", "k", "k_prime", "wcan_in_u", "wcan_in_u_prime", "stab", "orbit", "brute_stab", "representative"],
            &rows,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WittType {
    Alt,
    NonaltOdd,
    NonaltEven,
    All,
}

#[derive(Debug, Args)]
pub struct WittArgs {
    #[arg(long = "space-type", value_enum, default_value_t = WittType::All)]
    pub space_type: WittType,
    #[arg(long, default_value_t = 8)]
    pub max_dim: usize,
    /// Instances per space type.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Debug, Serialize)]
pub struct WittRow {
    pub space_type: String,
    pub seed: u64,
    pub trials: usize,
    pub extended: usize,
    pub rejected: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct WittReport {
    pub max_dim: usize,
    pub types: Vec<WittRow>,
}

pub fn witt(args: &WittArgs, seed: u64) -> Result<WittReport, Failure> {
    cap("--max-dim", args.max_dim as u64, 64)?;
    cap("--trials", args.trials as u64, 10_000_000)?;
    let types: Vec<SpaceType> = match args.space_type {
        WittType::Alt => vec![SpaceType::Alternating],
        WittType::NonaltOdd => vec![SpaceType::NonAltOdd],
        WittType::NonaltEven => vec![SpaceType::NonAltEven],
        WittType::All => vec![SpaceType::Alternating, SpaceType::NonAltOdd, SpaceType::NonAltEven],
    };
    let rows = types
        .into_iter()
        .enumerate()
        .map(|(i, ty)| {
            let s = seed.wrapping_add(i as u64);
            let r = symspace::witt_selftest(ty, args.max_dim, args.trials, s);
            WittRow {
                space_type: ty.to_string(),
                seed: s,
                trials: r.trials,
                extended: r.extended,
                rejected: r.rejected,
                failures: r.failures.len(),
                first_failure: r.failures.first().cloned(),
            }
        })
        .collect();
    Ok(WittReport { max_dim: args.max_dim, types: rows })
}

impl Report for WittReport {
    fn passed(&self) -> bool {
        self.types.iter().all(|t| t.failures == 0)
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for t in &self.types {
            out += &format!(
                "{} (dim <= {}, seed {}): {} instances, {} extended, {} rejected, {} failures\n",
                t.space_type, self.max_dim, t.seed, t.trials, t.extended, t.rejected, t.failures
            );
            if let Some(f) = &t.first_failure {
                out += &format!("  first failure: {f}\n");
            }
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_table(&["space_type", "seed", "trials", "extended", "rejected", "failures", "first_failure"], &self.types)
    }
}

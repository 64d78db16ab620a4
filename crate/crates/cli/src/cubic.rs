use clap::Args;
use serde::Serialize;
use sigmap::cubicforms::{self as cf, FormClassRecord};

use crate::output::{csv_table, Report};
use crate::{cap, Failure};

pub const MAX_DRAWS: u64 = 1_000_000_000;

/// Column order of every cubic CSV file.
pub const CSV_COLUMNS: [&str; 7] = ["a", "b", "c", "d", "disc", "maximal", "irreducible"];

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Height bound X: a, b in [0, X] and c, d in [-X, X].
    #[arg(long, default_value_t = 100)]
    pub height: i64,
    #[arg(long, default_value_t = 10_000)]
    pub draws: u64,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Discriminant bound D; every field with 0 < disc <= D is listed.
    #[arg(long, default_value_t = 1000)]
    pub bound: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormRow {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub disc: i128,
    pub maximal: bool,
    pub irreducible: bool,
}

impl From<&FormClassRecord> for FormRow {
    fn from(r: &FormClassRecord) -> Self {
        let f = r.reduced_form;
        FormRow { a: f.a, b: f.b, c: f.c, d: f.d, disc: r.disc, maximal: r.maximal, irreducible: r.irreducible }
    }
}

#[derive(Debug, Serialize)]
pub struct SampledForm {
    pub draw: u64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub disc: i128,
    pub maximal: bool,
    pub irreducible: bool,
}

impl SampledForm {
    fn form(&self) -> FormRow {
        FormRow {
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.d,
            disc: self.disc,
            maximal: self.maximal,
            irreducible: self.irreducible,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SampleReport {
    pub height: i64,
    pub draws: u64,
    pub seed: u64,
    pub accepted: Vec<SampledForm>,
}

pub fn sample(args: &SampleArgs, seed: u64) -> Result<SampleReport, Failure> {
    cap("--draws", args.draws, MAX_DRAWS)?;
    let run = cf::sample_forms(args.height, args.draws, seed)?;
    let accepted = run
        .accepted
        .iter()
        .map(|(i, r)| {
            let f = FormRow::from(r);
            SampledForm {
                draw: *i,
                a: f.a,
                b: f.b,
                c: f.c,
                d: f.d,
                disc: f.disc,
                maximal: f.maximal,
                irreducible: f.irreducible,
            }
        })
        .collect();
    Ok(SampleReport { height: args.height, draws: args.draws, seed, accepted })
}

fn form_line(f: &FormRow) -> String {
    format!("{:>10}  ({},{},{},{})", f.disc, f.a, f.b, f.c, f.d)
}

impl Report for SampleReport {
    fn text(&self) -> String {
        let mut out = format!(
            "cubic-sample X = {} draws {} seed {}: {} accepted\n",
            self.height,
            self.draws,
            self.seed,
            self.accepted.len()
        );
        for s in &self.accepted {
            out += &format!("draw {:>8}: {}\n", s.draw, form_line(&s.form()));
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        let rows: Vec<FormRow> = self.accepted.iter().map(SampledForm::form).collect();
        csv_table(&CSV_COLUMNS, &rows)
    }
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub bound: i64,
    pub fields: Vec<FormRow>,
}

pub fn scan(args: &ScanArgs) -> Result<ScanReport, Failure> {
    let fields = cf::scan(args.bound)?.iter().map(FormRow::from).collect();
    Ok(ScanReport { bound: args.bound, fields })
}

impl Report for ScanReport {
    fn text(&self) -> String {
        let mut out = format!("cubic-scan D = {}: {} fields\n", self.bound, self.fields.len());
        for f in &self.fields {
            out += &form_line(f);
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> Result<String, Failure> {
        csv_table(&CSV_COLUMNS, &self.fields)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_csv_layout() {
        let r = scan(&ScanArgs { bound: 100 }).unwrap();
        assert_eq!(
            r.csv().unwrap(),
            "a,b,c,d,disc,maximal,irreducible\n1,1,-2,-1,49,true,true\n1,0,-3,-1,81,true,true\n"
        );
    }

    #[test]
    fn scan_limit_is_a_resource_failure() {
        assert!(matches!(scan(&ScanArgs { bound: cf::MAX_SCAN_DISC + 1 }), Err(Failure::Resource(_))));
    }

    #[test]
    fn sample_is_seeded() {
        let a = sample(&SampleArgs { height: 20, draws: 3000 }, 5).unwrap();
        let b = sample(&SampleArgs { height: 20, draws: 3000 }, 5).unwrap();
        assert_eq!(a.text(), b.text());
        assert!(!a.accepted.is_empty());
    }
}

//! Side-by-side comparison of closed-form hierarchy energies with shooting
//! results, plus potential curves for every hierarchy member.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{
    build_grid, solve_spectrum_partial, EigenResult, GridOverrides, SolverOptions,
};
use crate::susy::{build_hierarchy, closed_form_energy, eval_potential, MemberRecord};

/// Ground rows count as exact below this `|ΔE|`.
pub const EXACT_THRESHOLD: f64 = 2e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub label: String,
    pub l: f64,
    pub b: f64,
    pub c: f64,
    pub k_max: usize,
}

impl ParameterSet {
    pub fn new(label: impl Into<String>, l: f64, b: f64, c: f64, k_max: usize) -> Self {
        Self {
            label: label.into(),
            l,
            b,
            c,
            k_max,
        }
    }

    /// Set I: `l = 1, b = 0.5, c = 0.01`.
    pub fn set_one() -> Self {
        Self::new("I", 1.0, 0.5, 0.01, 4)
    }

    /// Set II: `l = 1, b = 3, c = 1`.
    pub fn set_two() -> Self {
        Self::new("II", 1.0, 3.0, 1.0, 4)
    }

    pub fn named(label: &str) -> Option<Self> {
        match label {
            "I" | "i" | "1" => Some(Self::set_one()),
            "II" | "ii" | "2" => Some(Self::set_two()),
            _ => None,
        }
    }

    pub fn with_k_max(self, k_max: usize) -> Self {
        Self { k_max, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub susy_energy: f64,
    /// Entry `k` is level `n − k` of member `k`, in the original scale.
    pub numeric_by_member: Vec<Option<f64>>,
    /// Level `n` of the original potential minus `susy_energy`.
    pub delta_e: Option<f64>,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub label: String,
    pub l: f64,
    pub b: f64,
    pub c: f64,
    pub k_max: usize,
    pub members: Vec<MemberRecord>,
    pub rows: Vec<ComparisonRow>,
    pub diagnostics: Vec<String>,
}

pub fn run_comparison(
    set: &ParameterSet,
    overrides: &GridOverrides,
    opts: &SolverOptions,
) -> Result<TableReport> {
    let members = build_hierarchy(set.l, set.b, set.c, set.k_max)?;
    let target = closed_form_energy(set.l, set.b, set.c, set.k_max) + 4.0 * set.b.sqrt();
    // invalid overrides fail the whole table rather than every cell
    opts.validate()?;
    build_grid(&members[0], target, overrides)?;

    let columns: Vec<(Vec<f64>, Option<String>)> = members
        .par_iter()
        .map(|m| {
            let grid = match build_grid(m, target, overrides) {
                Ok(g) => g,
                Err(e) => return (Vec::new(), Some(format!("member {}: {e}", m.k))),
            };
            let (levels, failure) = solve_spectrum_partial(m, set.k_max - m.k, &grid, opts);
            (
                levels.into_iter().map(|lv| lv.energy).collect(),
                failure.map(|e| format!("member {}: {e}", m.k)),
            )
        })
        .collect();

    let diagnostics = columns.iter().filter_map(|c| c.1.clone()).collect();
    let rows = (0..=set.k_max)
        .map(|n| {
            let susy_energy = closed_form_energy(set.l, set.b, set.c, n);
            let numeric_by_member: Vec<Option<f64>> =
                (0..=n).map(|k| columns[k].0.get(n - k).copied()).collect();
            let delta_e = numeric_by_member[0].map(|e| e - susy_energy);
            let exact = n == 0 && delta_e.is_some_and(|d| d.abs() < EXACT_THRESHOLD);
            ComparisonRow {
                n,
                susy_energy,
                numeric_by_member,
                delta_e,
                exact,
            }
        })
        .collect();

    Ok(TableReport {
        label: set.label.clone(),
        l: set.l,
        b: set.b,
        c: set.c,
        k_max: set.k_max,
        members: members.iter().map(MemberRecord::from).collect(),
        rows,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub k: usize,
    pub points: Vec<(f64, f64)>,
}

/// Samples every member's potential (offset included) at `n_points`
/// uniformly spaced radii in `[r_lo, r_hi]`.
pub fn emit_curves(
    set: &ParameterSet,
    r_lo: f64,
    r_hi: f64,
    n_points: usize,
) -> Result<Vec<CurveSeries>> {
    if !(r_lo > 0.0 && r_lo.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "r must be positive (got r_lo = {r_lo})"
        )));
    }
    if !(r_hi > r_lo && r_hi.is_finite()) {
        return Err(Error::InvalidRange(format!(
            "r_hi must exceed r_lo (got {r_hi} <= {r_lo})"
        )));
    }
    if n_points < 2 {
        return Err(Error::InvalidRange(format!(
            "need at least 2 points (got {n_points})"
        )));
    }
    let members = build_hierarchy(set.l, set.b, set.c, set.k_max)?;
    let step = (r_hi - r_lo) / (n_points - 1) as f64;
    let radii: Vec<f64> = (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                r_hi
            } else {
                r_lo + step * i as f64
            }
        })
        .collect();
    members
        .iter()
        .map(|m| {
            let points = radii
                .iter()
                .map(|&r| Ok((r, eval_potential(m, r)?)))
                .collect::<Result<_>>()?;
            Ok(CurveSeries { k: m.k, points })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Human,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Format::Human),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Machine-format rendering of an energy: 12 significant digits.
pub fn fmt_energy(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn member_label(k: usize) -> String {
    format!("V{}", "'".repeat(k))
}

impl TableReport {
    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        out.l = round_sig(out.l);
        out.b = round_sig(out.b);
        out.c = round_sig(out.c);
        for m in &mut out.members {
            for v in [
                &mut m.a_k,
                &mut m.l_k,
                &mut m.offset,
                &mut m.slope,
                &mut m.pole,
                &mut m.shift,
                &mut m.remainder,
                &mut m.energy,
            ] {
                *v = round_sig(*v);
            }
        }
        for row in &mut out.rows {
            row.susy_energy = round_sig(row.susy_energy);
            row.delta_e = row.delta_e.map(round_sig);
            for cell in row.numeric_by_member.iter_mut().flatten() {
                *cell = round_sig(*cell);
            }
        }
        out
    }
}

pub fn render_report(report: &TableReport, format: Format) -> Result<String> {
    match format {
        Format::Human => Ok(report_table(report)),
        Format::Csv => report_csv(report),
        Format::Json => Ok(serde_json::to_string_pretty(&report.rounded())? + "\n"),
    }
}

fn report_table(report: &TableReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Set {}: l = {}, b = {}, c = {}",
        report.label, report.l, report.b, report.c
    );
    let _ = write!(s, "{:>3} {:>9}", "n", "E^S");
    for k in 0..=report.k_max {
        let _ = write!(s, " {:>9}", member_label(k));
    }
    let _ = writeln!(s, " {:>9}", "dE");
    for row in &report.rows {
        let _ = write!(s, "{:>3} {:>9.2}", row.n, row.susy_energy);
        for k in 0..=report.k_max {
            let cell = match row.numeric_by_member.get(k) {
                Some(Some(e)) => format!("{e:.2}"),
                _ => "-".to_string(),
            };
            let _ = write!(s, " {cell:>9}");
        }
        let delta = match (row.exact, row.delta_e) {
            (true, _) => "exact".to_string(),
            (false, Some(d)) => format!("{d:.2}"),
            (false, None) => "-".to_string(),
        };
        let _ = writeln!(s, " {delta:>9}");
    }
    for d in &report.diagnostics {
        let _ = writeln!(s, "# {d}");
    }
    s
}

fn csv_text(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_writer(Vec::new());
    write(&mut w)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

fn report_csv(report: &TableReport) -> Result<String> {
    csv_text(|w| {
        let mut header = vec!["n".to_string(), "susy_energy".to_string()];
        header.extend((0..=report.k_max).map(|k| format!("numeric_k{k}")));
        header.push("delta_e".to_string());
        w.write_record(&header)?;
        for row in &report.rows {
            let mut rec = vec![row.n.to_string(), fmt_energy(row.susy_energy)];
            rec.extend(
                (0..=report.k_max).map(|k| match row.numeric_by_member.get(k) {
                    Some(Some(e)) => fmt_energy(*e),
                    _ => String::new(),
                }),
            );
            rec.push(match (row.exact, row.delta_e) {
                (true, _) => "exact".to_string(),
                (false, Some(d)) => fmt_energy(d),
                (false, None) => String::new(),
            });
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn render_curves(curves: &[CurveSeries], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let rounded: Vec<CurveSeries> = curves
                .iter()
                .map(|c| CurveSeries {
                    k: c.k,
                    points: c
                        .points
                        .iter()
                        .map(|&(r, v)| (round_sig(r), round_sig(v)))
                        .collect(),
                })
                .collect();
            Ok(serde_json::to_string_pretty(&rounded)? + "\n")
        }
        Format::Csv => csv_text(|w| {
            let mut header = vec!["r".to_string()];
            header.extend(curves.iter().map(|c| format!("V{}", c.k)));
            w.write_record(&header)?;
            let rows = curves.first().map_or(0, |c| c.points.len());
            for i in 0..rows {
                let mut rec = vec![fmt_energy(curves[0].points[i].0)];
                rec.extend(curves.iter().map(|c| fmt_energy(c.points[i].1)));
                w.write_record(&rec)?;
            }
            Ok(())
        }),
        Format::Human => {
            let mut s = String::new();
            let _ = write!(s, "{:>10}", "r");
            for c in curves {
                let _ = write!(s, " {:>12}", member_label(c.k));
            }
            s.push('\n');
            let rows = curves.first().map_or(0, |c| c.points.len());
            for i in 0..rows {
                let _ = write!(s, "{:>10.4}", curves[0].points[i].0);
                for c in curves {
                    let _ = write!(s, " {:>12.4}", c.points[i].1);
                }
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Hierarchy listing: `k, a_k, l_k, offset, A, B, D, R, E_k` per member.
pub fn render_members(members: &[MemberRecord], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let rounded: Vec<MemberRecord> = members
                .iter()
                .map(|m| MemberRecord {
                    k: m.k,
                    a_k: round_sig(m.a_k),
                    l_k: round_sig(m.l_k),
                    offset: round_sig(m.offset),
                    slope: round_sig(m.slope),
                    pole: round_sig(m.pole),
                    shift: round_sig(m.shift),
                    remainder: round_sig(m.remainder),
                    energy: round_sig(m.energy),
                })
                .collect();
            Ok(serde_json::to_string_pretty(&rounded)? + "\n")
        }
        Format::Csv => csv_text(|w| {
            w.write_record(["k", "a_k", "l_k", "offset", "A", "B", "D", "R", "E_k"])?;
            for m in members {
                let fields = [
                    m.a_k,
                    m.l_k,
                    m.offset,
                    m.slope,
                    m.pole,
                    m.shift,
                    m.remainder,
                    m.energy,
                ];
                let mut rec = vec![m.k.to_string()];
                rec.extend(fields.iter().map(|&v| fmt_energy(v)));
                w.write_record(&rec)?;
            }
            Ok(())
        }),
        Format::Human => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:>3} {:>12} {:>5} {:>9} {:>10}",
                "k", "a_k", "l_k", "offset", "E_k"
            );
            for m in members {
                let _ = writeln!(
                    s,
                    "{:>3} {:>12.4e} {:>5} {:>9.4} {:>10.4}",
                    m.k, m.a_k, m.l_k, m.offset, m.energy
                );
            }
            Ok(s)
        }
    }
}

/// One solved level, as printed by the numeric listing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: usize,
    pub energy: f64,
    pub nodes: usize,
    pub residual: f64,
}

impl From<&EigenResult> for LevelRecord {
    fn from(e: &EigenResult) -> Self {
        Self {
            n: e.n,
            energy: e.energy,
            nodes: e.nodes,
            residual: e.residual,
        }
    }
}

pub fn render_levels(levels: &[LevelRecord], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let rounded: Vec<LevelRecord> = levels
                .iter()
                .map(|lv| LevelRecord {
                    energy: round_sig(lv.energy),
                    residual: round_sig(lv.residual),
                    ..*lv
                })
                .collect();
            Ok(serde_json::to_string_pretty(&rounded)? + "\n")
        }
        Format::Csv => csv_text(|w| {
            w.write_record(["n", "energy", "nodes", "residual"])?;
            for lv in levels {
                w.write_record([
                    lv.n.to_string(),
                    fmt_energy(lv.energy),
                    lv.nodes.to_string(),
                    fmt_energy(lv.residual),
                ])?;
            }
            Ok(())
        }),
        Format::Human => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "{:>3} {:>14} {:>5} {:>10}",
                "n", "E", "nodes", "residual"
            );
            for lv in levels {
                let _ = writeln!(
                    s,
                    "{:>3} {:>14.6} {:>5} {:>10.2e}",
                    lv.n, lv.energy, lv.nodes, lv.residual
                );
            }
            Ok(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sets() {
        assert_eq!(ParameterSet::named("I"), Some(ParameterSet::set_one()));
        assert_eq!(ParameterSet::named("II").unwrap().b, 3.0);
        assert!(ParameterSet::named("III").is_none());
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert_eq!(
            "xml".parse::<Format>(),
            Err(Error::UnknownFormat("xml".into()))
        );
    }

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(fmt_energy(3.535_527_655_932_737_5), "3.53552765593");
        assert_eq!(fmt_energy(-0.003_535_533_905_932_738), "-0.00353553390593");
        assert_eq!(fmt_energy(0.0), "0");
        assert_eq!(
            round_sig(round_sig(14.849_241_710_473_056)),
            round_sig(14.849_241_710_473_056)
        );
    }

    #[test]
    fn curve_sampling_endpoints() {
        let curves = emit_curves(&ParameterSet::set_one(), 0.3, 4.0, 2).unwrap();
        assert_eq!(curves.len(), 5);
        for c in &curves {
            assert_eq!(c.points.len(), 2);
            assert_eq!(c.points[0].0, 0.3);
            assert_eq!(c.points[1].0, 4.0);
        }
        assert!(matches!(
            emit_curves(&ParameterSet::set_one(), 0.0, 4.0, 10),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            emit_curves(&ParameterSet::set_one(), 1.0, 0.5, 10),
            Err(Error::InvalidRange(_))
        ));
        assert!(matches!(
            emit_curves(&ParameterSet::set_one(), 0.5, 1.0, 1),
            Err(Error::InvalidRange(_))
        ));
    }

    #[test]
    fn curve_csv_layout() {
        let curves = emit_curves(&ParameterSet::set_two(), 0.3, 4.0, 200).unwrap();
        let csv = render_curves(&curves, Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r,V0,V1,V2,V3,V4"));
        assert_eq!(lines.count(), 200);
    }

    #[test]
    fn empty_report_is_header_only() {
        let report = TableReport {
            label: "x".into(),
            l: 1.0,
            b: 1.0,
            c: 1.0,
            k_max: 1,
            members: vec![],
            rows: vec![],
            diagnostics: vec![],
        };
        let csv = render_report(&report, Format::Csv).unwrap();
        assert_eq!(csv, "n,susy_energy,numeric_k0,numeric_k1,delta_e\n");
    }

    #[test]
    fn absent_cells_render_as_placeholders() {
        let report = TableReport {
            label: "x".into(),
            l: 1.0,
            b: 1.0,
            c: 1.0,
            k_max: 1,
            members: vec![],
            rows: vec![ComparisonRow {
                n: 1,
                susy_energy: 2.5,
                numeric_by_member: vec![None, Some(2.25)],
                delta_e: None,
                exact: false,
            }],
            diagnostics: vec!["member 0: failed".into()],
        };
        let csv = render_report(&report, Format::Csv).unwrap();
        assert_eq!(csv.lines().nth(1), Some("1,2.5,,2.25,"));
        let human = render_report(&report, Format::Human).unwrap();
        assert!(human.contains("     -      2.25         -"), "{human}");
        let json: serde_json::Value =
            serde_json::from_str(&render_report(&report, Format::Json).unwrap()).unwrap();
        assert!(json["rows"][0]["numeric_by_member"][0].is_null());
        assert!(json["rows"][0]["delta_e"].is_null());
    }

    #[test]
    fn single_row_comparison_is_exact() {
        let report = run_comparison(
            &ParameterSet::set_one().with_k_max(0),
            &GridOverrides::default(),
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].exact);
        assert!(render_report(&report, Format::Human)
            .unwrap()
            .contains("exact"));
    }
}

//! Which groups `Z4^{2k} × Z2^{4ℓ−4k}` receive a lifted quadric PDS of each type.
//!
//! A set of negative Latin square type needs an odd `j` with `k ≤ j ≤ ℓ`,
//! one of Latin square type an even `j` in the same range (`j = 0` only for
//! the elementary abelian baseline `k = 0`).

use std::fmt::Write as _;

use crate::lift::GroupShape;
use crate::params::PdsParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Availability {
    /// Realized by `D_{ℓ,j,k}` for the smallest admissible `j`.
    Available { j: usize, params: PdsParams },
    /// A witness `j` exists but the parameter formula gives the empty set.
    Degenerate { j: usize },
    /// No `j` of the right parity lies in `k..=ℓ`.
    Unavailable,
}

impl Availability {
    pub fn is_available(&self) -> bool {
        matches!(self, Availability::Available { .. })
    }

    fn label(&self) -> String {
        match self {
            Availability::Available { j, .. } => format!("yes (j={j})"),
            Availability::Degenerate { j } => format!("degenerate (j={j}, empty)"),
            Availability::Unavailable => "no".into(),
        }
    }

    fn params_field(&self) -> String {
        match self {
            Availability::Available { params, .. } => {
                let [v, k, l, m] = params.as_array();
                format!("{v};{k};{l};{m}")
            }
            _ => String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageRow {
    pub ell: usize,
    pub k: usize,
    pub group: String,
    pub negative_latin: Availability,
    pub latin: Availability,
}

fn witness(ell: usize, k: usize, odd: bool) -> Availability {
    match (k..=ell).find(|j| (j % 2 == 1) == odd) {
        None => Availability::Unavailable,
        Some(j) => {
            let params = PdsParams::for_form(ell, j);
            if params.k <= 0 {
                Availability::Degenerate { j }
            } else {
                Availability::Available { j, params }
            }
        }
    }
}

/// One row per `(ℓ, k)` with `1 ≤ ℓ ≤ max_ell`, `0 ≤ k ≤ ℓ`.
pub fn coverage_table(max_ell: usize) -> Vec<CoverageRow> {
    let mut rows = Vec::new();
    for ell in 1..=max_ell {
        for k in 0..=ell {
            let group = GroupShape::new(ell, k)
                .map(|s| s.name())
                .unwrap_or_default();
            rows.push(CoverageRow {
                ell,
                k,
                group,
                negative_latin: witness(ell, k, true),
                latin: witness(ell, k, false),
            });
        }
    }
    rows
}

pub fn render_csv(rows: &[CoverageRow]) -> String {
    let mut out =
        String::from("ell,k,group,negative_latin,negative_latin_params,latin,latin_params\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.ell,
            r.k,
            r.group,
            r.negative_latin.label(),
            r.negative_latin.params_field(),
            r.latin.label(),
            r.latin.params_field()
        );
    }
    out
}

pub fn render_text(rows: &[CoverageRow]) -> String {
    let mut out = format!(
        "{:>3} {:>3}  {:<16} {:<26} {:<28} {:<12} {}\n",
        "ell", "k", "group", "negative Latin", "params", "Latin", "params"
    );
    for r in rows {
        let p = |a: &Availability| match a {
            Availability::Available { params, .. } => params.to_string(),
            _ => "-".into(),
        };
        let _ = writeln!(
            out,
            "{:>3} {:>3}  {:<16} {:<26} {:<28} {:<12} {}",
            r.ell,
            r.k,
            r.group,
            r.negative_latin.label(),
            p(&r.negative_latin),
            r.latin.label(),
            p(&r.latin)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(rows: &[CoverageRow], ell: usize, k: usize) -> &CoverageRow {
        rows.iter().find(|r| r.ell == ell && r.k == k).unwrap()
    }

    #[test]
    fn ell_two_pattern() {
        let rows = coverage_table(2);
        for k in 0..=1 {
            assert!(row(&rows, 2, k).negative_latin.is_available());
        }
        assert_eq!(row(&rows, 2, 2).negative_latin, Availability::Unavailable);
        for k in 0..=2 {
            assert!(row(&rows, 2, k).latin.is_available());
        }
        assert_eq!(row(&rows, 2, 2).group, "Z4^4");
    }

    #[test]
    fn ell_three_pattern() {
        let rows = coverage_table(3);
        for k in 0..=3 {
            assert!(row(&rows, 3, k).negative_latin.is_available());
        }
        assert_eq!(row(&rows, 3, 3).latin, Availability::Unavailable);
    }

    #[test]
    fn ell_one_is_degenerate_for_odd_j() {
        let rows = coverage_table(1);
        assert_eq!(
            row(&rows, 1, 1).negative_latin,
            Availability::Degenerate { j: 1 }
        );
        assert_eq!(row(&rows, 1, 1).latin, Availability::Unavailable);
        assert!(row(&rows, 1, 0).latin.is_available());
    }

    #[test]
    fn csv_has_one_line_per_shape() {
        let csv = render_csv(&coverage_table(4));
        assert_eq!(csv.lines().count(), 1 + 2 + 3 + 4 + 5);
        assert!(csv.contains("2,1,Z4^2 x Z2^4,yes (j=1),256;51;2;12,yes (j=2),256;75;26;20"));
    }
}

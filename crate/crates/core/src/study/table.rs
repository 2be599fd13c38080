use std::fmt::Write as _;

use crate::solver::ErrorNorms;

pub const CSV_HEADER: &str = "level,h,n_u,n_p,err_H1_u,err_L2_p,eta,osc_f,effectivity,rate";

/// How the rate column is computed from consecutive rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    /// `log2(E_prev / E)` for meshes whose size halves.
    Halving,
    /// `-2 ln(E / E_prev) / ln(N / N_prev)` in the number of DOFs `N`.
    Dofs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    /// Largest element diameter.
    pub h: f64,
    pub n_triangles: usize,
    pub n_u: usize,
    pub n_p: usize,
    pub errors: Option<ErrorNorms>,
    pub eta: f64,
    pub osc_f: f64,
    pub osc_t: f64,
    pub effectivity: Option<f64>,
    /// Largest per-element efficiency ratio, when audited.
    pub efficiency_max: Option<f64>,
}

impl LevelRecord {
    pub fn n_dofs(&self) -> usize {
        self.n_u + self.n_p
    }

    /// The quantity rates are measured on: the combined error when known,
    /// otherwise the estimator.
    pub fn rate_quantity(&self) -> f64 {
        self.errors.map_or(self.eta, |e| e.combined())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<LevelRecord>,
    pub rate_kind: RateKind,
    pub alpha: f64,
}

fn rate_between(kind: RateKind, prev: (f64, usize), cur: (f64, usize)) -> f64 {
    match kind {
        RateKind::Halving => (prev.0 / cur.0).log2(),
        RateKind::Dofs => -2.0 * (cur.0 / prev.0).ln() / (cur.1 as f64 / prev.1 as f64).ln(),
    }
}

impl ConvergenceTable {
    fn series_rates(&self, value: impl Fn(&LevelRecord) -> f64) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| {
                rate_between(
                    self.rate_kind,
                    (value(&w[0]), w[0].n_dofs()),
                    (value(&w[1]), w[1].n_dofs()),
                )
            })
            .collect()
    }

    /// One rate per consecutive pair of rows.
    pub fn rates(&self) -> Vec<f64> {
        self.series_rates(LevelRecord::rate_quantity)
    }

    pub fn eta_rates(&self) -> Vec<f64> {
        self.series_rates(|r| r.eta)
    }

    pub fn osc_rates(&self) -> Vec<f64> {
        self.series_rates(|r| r.osc_f)
    }

    /// Rate over the last two rows.
    pub fn last_rate(&self) -> Option<f64> {
        self.rates().last().copied()
    }

    pub fn effectivities(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.effectivity).collect()
    }

    /// Table with the columns of [`CSV_HEADER`]; missing values are empty.
    pub fn to_csv(&self) -> String {
        let rates = self.rates();
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for (i, r) in self.rows.iter().enumerate() {
            let rate = if i == 0 { None } else { Some(rates[i - 1]) };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.level,
                r.h,
                r.n_u,
                r.n_p,
                opt(r.errors.map(|e| e.velocity_h1)),
                opt(r.errors.map(|e| e.pressure_l2)),
                r.eta,
                r.osc_f,
                opt(r.effectivity),
                opt(rate),
            )
            .expect("writing to a String");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(level: usize, h: f64, n: usize, err: f64) -> LevelRecord {
        LevelRecord {
            level,
            h,
            n_triangles: 0,
            n_u: n,
            n_p: 0,
            errors: Some(ErrorNorms {
                strain_l2: err,
                velocity_h1: err,
                pressure_l2: err,
            }),
            eta: 2.0 * err,
            osc_f: err * err,
            osc_t: 0.0,
            effectivity: Some(1.0),
            efficiency_max: None,
        }
    }

    #[test]
    fn halving_rates() {
        let t = ConvergenceTable {
            rows: vec![
                row(0, 0.5, 10, 0.4),
                row(1, 0.25, 40, 0.1),
                row(2, 0.125, 160, 0.05),
            ],
            rate_kind: RateKind::Halving,
            alpha: 0.1,
        };
        assert_eq!(t.rates(), vec![2.0, 1.0]);
        assert_eq!(t.osc_rates(), vec![4.0, 2.0]);
        let csv = t.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,0.5,10,0,0.4,0.4,0.8,0.16000000000000003,1,");
        assert!(lines[2].ends_with(",2"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn dof_rates_match_halving_for_fourfold_dofs() {
        let t = ConvergenceTable {
            rows: vec![row(0, 0.5, 10, 0.4), row(1, 0.25, 40, 0.1)],
            rate_kind: RateKind::Dofs,
            alpha: 0.1,
        };
        assert!((t.rates()[0] - 2.0).abs() < 1e-14);
    }
}

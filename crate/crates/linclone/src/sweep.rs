//! Fidelity tables along one parameter.

use std::io::Write;

use linclone_core::ensemble::{average_fidelity, clone_fidelity, Ensemble, SqueezingWeight};
use linclone_core::quadrature::QuadratureSpec;
use linclone_core::{ClonerConfig, GaussianState, Propagation};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::{Quantity, SweepArgs};
use crate::error::{CliError, CliResult};
use crate::format::sig9;
use crate::report::prop_name;

/// A validated sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub etas: Vec<f64>,
    /// Propagation rules, one column group each.
    pub modes: Vec<Propagation>,
    pub weight: SqueezingWeight,
}

impl SweepSpec {
    /// Checks `lo < hi`, `steps ≥ 2` and `η ∈ (0, 1]`.
    pub fn new(
        quantity: Quantity,
        (lo, hi, steps): (f64, f64, usize),
        etas: Vec<f64>,
        modes: Vec<Propagation>,
        weight: SqueezingWeight,
    ) -> CliResult<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::Usage(format!("sweep range needs lo < hi, got {lo}..{hi}")));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!("sweep needs at least 2 steps, got {steps}")));
        }
        if etas.is_empty() {
            return Err(CliError::Usage("sweep needs at least one eta".into()));
        }
        if let Some(e) = etas.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(CliError::Usage(format!("eta = {e} outside (0, 1]")));
        }
        Ok(Self {
            quantity,
            lo,
            hi,
            steps,
            etas,
            modes,
            weight,
        })
    }

    /// Builds the spec from parsed flags.
    pub fn from_args(a: &SweepArgs) -> CliResult<Self> {
        let modes = if a.both_modes {
            vec![Propagation::Physical, Propagation::PaperLinearG]
        } else {
            vec![a.prop.into()]
        };
        Self::new(a.quantity, (a.lo, a.hi, a.steps), a.eta.clone(), modes, a.squeezing_weight.into())
    }

    /// Abscissae, ends included.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / last })
            .collect()
    }

    /// Column names.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec![self.quantity.column().to_owned()];
        for eta in &self.etas {
            if self.modes.len() == 1 {
                h.push(format!("F_eta_{eta}"));
            } else {
                h.extend(self.modes.iter().map(|m| format!("F_eta_{eta}_{}", prop_name(*m))));
            }
        }
        h
    }
}

/// Fidelity at abscissa `x` for one efficiency and propagation rule.
pub fn fidelity_at(q: Quantity, x: f64, eta: f64, mode: Propagation, weight: SqueezingWeight) -> CliResult<f64> {
    let origin = Complex64::new(0.0, 0.0);
    let symmetric = ClonerConfig::symmetric(eta).with_propagation(mode);
    let quad = QuadratureSpec::default();
    let f = match q {
        Quantity::Tau1 => {
            let cfg = ClonerConfig::unity_gain(x, eta, mode)?;
            clone_fidelity(&GaussianState::coherent(0.0, 0.0), &cfg)?.value()
        }
        Quantity::Xi => clone_fidelity(&GaussianState::squeezed(origin, x, 0.0)?, &symmetric)?.value(),
        Quantity::N => clone_fidelity(&GaussianState::thermal(origin, x)?, &symmetric)?.value(),
        Quantity::SigmaS | Quantity::BigN | Quantity::MuN => {
            let ensemble = match q {
                Quantity::SigmaS => Ensemble::GaussianSqueezing { sigma_s: x, weight },
                Quantity::BigN => Ensemble::TopHatThermal { max_photons: x },
                _ => Ensemble::HalfGaussianThermal { mu_n: x },
            };
            average_fidelity(&ensemble, &symmetric, &quad)?.fidelity.value()
        }
    };
    Ok(f)
}

/// Evaluates every row; rows come back in abscissa order.
pub fn evaluate(spec: &SweepSpec) -> CliResult<Vec<Vec<f64>>> {
    spec.points()
        .into_par_iter()
        .map(|x| {
            let mut row = vec![x];
            for &eta in &spec.etas {
                for &mode in &spec.modes {
                    row.push(fidelity_at(spec.quantity, x, eta, mode, spec.weight)?);
                }
            }
            Ok(row)
        })
        .collect()
}

/// Writes the table as CSV with `\n` line endings.
pub fn write_csv<W: Write>(spec: &SweepSpec, rows: &[Vec<f64>], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(spec.header())?;
    for row in rows {
        w.write_record(row.iter().map(|v| sig9(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep and renders the CSV text.
pub fn render(spec: &SweepSpec) -> CliResult<String> {
    let rows = evaluate(spec)?;
    let mut buf = Vec::new();
    write_csv(spec, &rows, &mut buf).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(buf).expect("csv output is ascii"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(q: Quantity, lo: f64, hi: f64, steps: usize) -> SweepSpec {
        SweepSpec::new(q, (lo, hi, steps), vec![1.0, 0.75, 0.5], vec![Propagation::Physical], SqueezingWeight::Prior).unwrap()
    }

    #[test]
    fn header_names() {
        let s = spec(Quantity::MuN, 0.1, 1.0, 3);
        assert_eq!(s.header(), ["mu_N", "F_eta_1", "F_eta_0.75", "F_eta_0.5"]);
        let mut b = s.clone();
        b.modes = vec![Propagation::Physical, Propagation::PaperLinearG];
        b.etas = vec![1.0];
        assert_eq!(b.header(), ["mu_N", "F_eta_1_physical", "F_eta_1_paper"]);
    }

    #[test]
    fn points_hit_both_ends() {
        let p = spec(Quantity::Tau1, 0.1, 0.7, 7).points();
        assert_eq!(p.len(), 7);
        assert_eq!(p[0], 0.1);
        assert_eq!(p[6], 0.7);
        assert!((p[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let w = SqueezingWeight::Prior;
        let m = vec![Propagation::Physical];
        assert!(SweepSpec::new(Quantity::N, (1.0, 1.0, 5), vec![1.0], m.clone(), w).is_err());
        assert!(SweepSpec::new(Quantity::N, (0.0, 1.0, 1), vec![1.0], m.clone(), w).is_err());
        assert!(SweepSpec::new(Quantity::N, (0.0, 1.0, 5), vec![1.2], m.clone(), w).is_err());
        assert!(SweepSpec::new(Quantity::N, (0.0, 1.0, 5), vec![], m, w).is_err());
    }

    #[test]
    fn tau1_row_at_half() {
        let text = render(&spec(Quantity::Tau1, 0.1, 0.9, 5)).unwrap();
        let row: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
        assert_eq!(row, ["0.500000000", "0.666666667", "0.600000000", "0.500000000"]);
    }

    #[test]
    fn xi_row_at_zero() {
        let text = render(&spec(Quantity::Xi, 0.0, 2.0, 5)).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("0,0.666666667,"));
    }

    #[test]
    fn thermal_rows_increase() {
        let rows = evaluate(&spec(Quantity::N, 0.0, 5.0, 26)).unwrap();
        assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    }
}

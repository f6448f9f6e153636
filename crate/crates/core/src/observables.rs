//! Concurrence, expectation values and named observable series.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron, psd_sqrt, trace, CMatrix, C64};
use crate::models::sigma_y;

/// Wootters concurrence of a two-qubit state.
///
/// Returns the value and whether `rho` had eigenvalues below `-1e-8`.
pub fn concurrence_checked(rho: &CMatrix) -> Result<(f64, bool)> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: rho.nrows(),
        });
    }
    let unphysical = hermitian_eigenvalues(rho)[0] < -1e-8;
    let yy = kron(&sigma_y(), &sigma_y());
    let flipped = &yy * rho.conjugate() * &yy;
    let sq = psd_sqrt(rho);
    let r = &sq * flipped * &sq;
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&r).iter().map(|v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok((c.clamp(0.0, 1.0), unphysical))
}

pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    concurrence_checked(rho).map(|(c, _)| c)
}

/// `Tr(rho op)`.
pub fn expectation(rho: &CMatrix, op: &CMatrix) -> Result<C64> {
    if rho.ncols() != op.nrows() || rho.nrows() != op.ncols() {
        return Err(Error::Dimension {
            expected: rho.nrows(),
            got: op.nrows(),
        });
    }
    Ok(trace(&(rho * op)))
}

/// Named series sampled on a common time grid.
#[derive(Debug, Clone, Default)]
pub struct ObservableReport {
    pub times: Vec<f64>,
    pub real: BTreeMap<String, Vec<f64>>,
    pub complex: BTreeMap<String, Vec<C64>>,
    /// Count of states flagged unphysical by the concurrence evaluation.
    pub unphysical_states: usize,
}

impl ObservableReport {
    pub fn new(times: Vec<f64>) -> Self {
        Self {
            times,
            ..Self::default()
        }
    }

    pub fn add_real(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        self.check_len(values.len())?;
        self.real.insert(name.to_string(), values);
        Ok(())
    }

    pub fn add_complex(&mut self, name: &str, values: Vec<C64>) -> Result<()> {
        self.check_len(values.len())?;
        self.complex.insert(name.to_string(), values);
        Ok(())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n == self.times.len() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.times.len(),
                got: n,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c, identity, outer, CVector, ONE, ZERO};
    use crate::models::{sigma_minus, sigma_plus, sigma_z};

    fn bell() -> CMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![c(r, 0.0), ZERO, ZERO, c(r, 0.0)]);
        outer(&v)
    }

    #[test]
    fn bell_state_is_maximally_entangled() {
        assert!((concurrence(&bell()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        assert!(concurrence(&outer(&basis_vector(4, 1))).unwrap() < 1e-12);
    }

    #[test]
    fn werner_state() {
        // Independent closed form (3p - 1) / 2 at p = 0.6.
        let rho = bell() * C64::from(0.6) + identity(4) * C64::from(0.1);
        assert!((concurrence(&rho).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn expectations() {
        let half = identity(2) * C64::from(0.5);
        assert!(expectation(&half, &sigma_z()).unwrap().norm() < 1e-15);
        let e = outer(&basis_vector(2, 0));
        assert_eq!(expectation(&e, &(sigma_plus() * sigma_minus())).unwrap(), ONE);
    }

    #[test]
    fn report_rejects_ragged_series() {
        let mut r = ObservableReport::new(vec![0.0, 1.0]);
        assert!(r.add_real("a", vec![1.0]).is_err());
        assert!(r.add_real("a", vec![1.0, 2.0]).is_ok());
    }
}

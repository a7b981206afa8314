use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub raw_agreement: f64,
    pub cohens_kappa: f64,
}

/// Raw agreement and Cohen's kappa between two labelings of the same items.
///
/// Chance agreement comes from each side's marginal label frequencies. When
/// both sides use one identical constant label, chance agreement is 1 and
/// kappa is reported as 1.
pub fn compute_agreement<L: ClassLabel>(a: &[L], b: &[L]) -> Result<AgreementReport> {
    if a.len() != b.len() {
        return Err(Error::InputShape(format!("labelings differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::InputShape("labelings are empty".into()));
    }
    let n = a.len() as f64;
    let k = L::ALL.len();
    let mut freq_a = vec![0usize; k];
    let mut freq_b = vec![0usize; k];
    let mut same = 0usize;
    for (x, y) in a.iter().zip(b) {
        freq_a[x.index()] += 1;
        freq_b[y.index()] += 1;
        if x == y {
            same += 1;
        }
    }
    let p_o = same as f64 / n;
    let p_e: f64 = freq_a.iter().zip(&freq_b).map(|(&x, &y)| (x as f64 / n) * (y as f64 / n)).sum();
    let kappa = if (1.0 - p_e).abs() < 1e-12 { 1.0 } else { (p_o - p_e) / (1.0 - p_e) };
    Ok(AgreementReport { raw_agreement: p_o, cohens_kappa: kappa })
}

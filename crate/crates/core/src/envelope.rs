//! Monotone envelopes of sampled functions and their contact sets.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeKind {
    UpperDecreasing,
    LowerIncreasing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub values: Vec<f64>,
    pub contact: Vec<bool>,
    pub kind: EnvelopeKind,
    pub tol: f64,
}

impl Envelope {
    /// First contact index (the contact set always holds the last index).
    pub fn first_contact(&self) -> usize {
        self.contact.iter().position(|&c| c).unwrap_or(self.values.len() - 1)
    }
}

/// Contact tolerance `10⁻¹⁰·(1 + max|f|)`.
pub fn default_tol(f: &[f64]) -> f64 {
    1e-10 * (1.0 + f.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Smallest non-increasing majorant: the suffix maximum.
pub fn upper_decreasing_envelope(f: &[f64], tol: f64) -> Result<Envelope> {
    if f.is_empty() {
        return Err(Error::Empty);
    }
    let mut values = f.to_vec();
    for k in (0..f.len() - 1).rev() {
        values[k] = values[k].max(values[k + 1]);
    }
    Ok(finish(f, values, EnvelopeKind::UpperDecreasing, tol))
}

/// Largest non-decreasing minorant: the suffix minimum.
pub fn lower_increasing_envelope(f: &[f64], tol: f64) -> Result<Envelope> {
    if f.is_empty() {
        return Err(Error::Empty);
    }
    let mut values = f.to_vec();
    for k in (0..f.len() - 1).rev() {
        values[k] = values[k].min(values[k + 1]);
    }
    Ok(finish(f, values, EnvelopeKind::LowerIncreasing, tol))
}

fn finish(f: &[f64], values: Vec<f64>, kind: EnvelopeKind, tol: f64) -> Envelope {
    let contact = values.iter().zip(f).map(|(v, x)| (v - x).abs() <= tol).collect();
    Envelope { values, contact, kind, tol }
}

/// Checks that the upper decreasing envelope of `f[0..=tau_idx]` agrees with
/// that of the whole of `f` on `[0, k_star]`, for `k_star` a contact point.
pub fn envelope_restriction(f: &[f64], k_star: usize, tau_idx: usize) -> Result<bool> {
    let tol = default_tol(f);
    let full = upper_decreasing_envelope(f, tol)?;
    if k_star >= f.len() || !full.contact[k_star] {
        return Err(Error::NotContact);
    }
    if tau_idx < k_star || tau_idx >= f.len() {
        return Err(Error::Data(format!("restriction index {tau_idx} outside [{k_star}, {})", f.len())));
    }
    let part = upper_decreasing_envelope(&f[..=tau_idx], tol)?;
    Ok((0..=k_star).all(|k| (part.values[k] - full.values[k]).abs() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_max_example() {
        let e = upper_decreasing_envelope(&[3.0, 1.0, 2.0, 0.0], 1e-12).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 2.0, 0.0]);
        assert_eq!(e.contact, vec![true, false, true, true]);
        assert_eq!(e.first_contact(), 0);
    }

    #[test]
    fn suffix_min_example() {
        let e = lower_increasing_envelope(&[0.0, 2.0, 1.0, 3.0], 1e-12).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 1.0, 3.0]);
        assert_eq!(e.contact, vec![true, false, true, true]);
    }

    #[test]
    fn monotone_input_is_its_own_envelope() {
        let f: Vec<f64> = (0..20).map(|k| -(k as f64) * 0.3).collect();
        let e = upper_decreasing_envelope(&f, 0.0).unwrap();
        assert_eq!(e.values, f);
        assert!(e.contact.iter().all(|&c| c));
        let g: Vec<f64> = f.iter().rev().copied().collect();
        assert_eq!(lower_increasing_envelope(&g, 0.0).unwrap().values, g);
    }

    #[test]
    fn empty_rejected() {
        assert!(upper_decreasing_envelope(&[], 0.0).is_err());
        assert!(lower_increasing_envelope(&[], 0.0).is_err());
    }

    #[test]
    fn restriction_examples() {
        assert!(envelope_restriction(&[3.0, 1.0, 2.0, 0.0], 2, 3).unwrap());
        let dec: Vec<f64> = (0..10).map(|k| 10.0 - k as f64).collect();
        for k in 0..10 {
            for tau in k..10 {
                assert!(envelope_restriction(&dec, k, tau).unwrap());
            }
        }
        assert!(matches!(envelope_restriction(&[3.0, 1.0, 2.0, 0.0], 1, 3), Err(Error::NotContact)));
    }
}

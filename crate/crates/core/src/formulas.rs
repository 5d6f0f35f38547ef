//! Closed-form multiplicities and free-resolution Hilbert sequences.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matfam::SymmetryClass;

/// `C(m, r)` with `C(m, r) = 0` for `m < r` (including negative `m`).
pub fn binom(m: i64, r: i64) -> i64 {
    if r < 0 || m < r {
        return 0;
    }
    let r = r.min(m - r);
    let mut acc: i128 = 1;
    for i in 0..r {
        acc = acc * (m - i) as i128 / (i + 1) as i128;
    }
    acc as i64
}

/// Number of complex Weyl points born from an isolated `k`-fold point.
pub fn multiplicity_formula(k: u32, class: SymmetryClass) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let k = k as u64;
    Ok(match class {
        SymmetryClass::Hermitian | SymmetryClass::General => k * k * (k * k - 1) / 12,
        SymmetryClass::Symmetric => k * (k * k - 1) / 6,
        SymmetryClass::Diagonal => k * (k - 1) / 2,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertSequence {
    pub dims: Vec<u64>,
    pub total: u64,
}

impl HilbertSequence {
    fn from_dims(dims: Vec<u64>) -> Self {
        let total = dims.iter().sum();
        Self { dims, total }
    }

    pub fn is_palindromic(&self) -> bool {
        self.dims.iter().eq(self.dims.iter().rev())
    }
}

/// Hilbert sequence of `O₄/I_{k−1}` read off the Gulliksen–Negård
/// resolution, degrees `0..=2k−4`.
pub fn gn_hilbert_sequence(k: u32) -> Result<HilbertSequence> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let k = k as i64;
    let c3 = |m: i64| binom(m, 3);
    let dims = (0..=2 * k - 4)
        .map(|d| {
            let v = c3(d + 3) - k * k * c3(d - k + 4) + (2 * k * k - 2) * c3(d - k + 3)
                - k * k * c3(d - k + 2)
                + c3(d - 2 * k + 3);
            v as u64
        })
        .collect();
    Ok(HilbertSequence::from_dims(dims))
}

/// Symmetric-case total `C(k+1, 3)` in closed form.
pub fn jozefiak_total(k: u32) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    Ok(binom(k as i64 + 1, 3) as u64)
}

/// Degree sequence `C(d+2, 2)`, `d = 0..=k−2`, summing to `C(k+1, 3)`.
pub fn jozefiak_sequence(k: u32) -> Result<HilbertSequence> {
    if k < 2 {
        return Err(Error::InvalidArgument("k must be at least 2".into()));
    }
    let dims = (0..=k as i64 - 2).map(|d| binom(d + 2, 2) as u64).collect();
    Ok(HilbertSequence::from_dims(dims))
}

/// Partial sums `−Σ_{i≤j} c_i` for `j` in the cluster interior: the signed
/// algebraic Weyl point count of each band pair.
pub fn partial_sums(cherns: &[i64]) -> Vec<i64> {
    let mut acc = 0;
    let mut out = Vec::new();
    for c in cherns.iter().take(cherns.len().saturating_sub(1)) {
        acc += c;
        out.push(-acc);
    }
    out
}

/// `Σ_j |Σ_{i≤j} c_i|` over the cluster interior. The second value is a
/// warning when the cluster sum is nonzero.
pub fn lower_bound_from_cherns(cherns: &[i64]) -> (u64, Option<String>) {
    let lb = partial_sums(cherns).iter().map(|v| v.unsigned_abs()).sum();
    let total: i64 = cherns.iter().sum();
    let warn = (total != 0).then(|| format!("Chern numbers sum to {total}, not 0"));
    (lb, warn)
}

/// Spin Chern numbers `(2a)` for `a = −s..s`, ascending band order.
pub fn spin_cherns(two_s: u32) -> Vec<i64> {
    (0..=two_s as i64).map(|r| 2 * r - two_s as i64).collect()
}

/// `k(k²−1)/6` with `k = 2s+1`.
pub fn spin_lower_bound(two_s: u32) -> Result<u64> {
    if two_s == 0 {
        return Err(Error::InvalidArgument("spin must be positive".into()));
    }
    let k = two_s as u64 + 1;
    Ok(k * (k * k - 1) / 6)
}

pub fn parity_consistent(n_real: u64, n_complex: u64) -> bool {
    n_real % 2 == n_complex % 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        use SymmetryClass::*;
        assert_eq!(multiplicity_formula(3, Hermitian).unwrap(), 6);
        assert_eq!(multiplicity_formula(4, Hermitian).unwrap(), 20);
        assert_eq!(multiplicity_formula(3, Symmetric).unwrap(), 4);
        assert_eq!(multiplicity_formula(5, Diagonal).unwrap(), 10);
        assert!(multiplicity_formula(1, Diagonal).is_err());
    }

    #[test]
    fn gn_sequences() {
        assert_eq!(gn_hilbert_sequence(3).unwrap().dims, vec![1, 4, 1]);
        assert_eq!(gn_hilbert_sequence(4).unwrap().dims, vec![1, 4, 10, 4, 1]);
        assert_eq!(gn_hilbert_sequence(2).unwrap().dims, vec![1]);
        for k in 2..=8 {
            let s = gn_hilbert_sequence(k).unwrap();
            assert_eq!(s.total, multiplicity_formula(k, SymmetryClass::Hermitian).unwrap());
            assert!(s.is_palindromic());
        }
    }

    #[test]
    fn jozefiak() {
        assert_eq!(jozefiak_total(3).unwrap(), 4);
        assert_eq!(jozefiak_total(2).unwrap(), 1);
        assert_eq!(jozefiak_total(6).unwrap(), 35);
        for k in 2..=8 {
            let s = jozefiak_sequence(k).unwrap();
            assert_eq!(s.total, jozefiak_total(k).unwrap());
            assert_eq!(k >= 3, !s.is_palindromic());
        }
    }

    #[test]
    fn chern_bounds() {
        assert_eq!(lower_bound_from_cherns(&[-2, 0, 2]).0, 4);
        assert_eq!(lower_bound_from_cherns(&[-3, 5, -5, 3]).0, 8);
        assert_eq!(lower_bound_from_cherns(&[-3, -1, 1, 3]).0, 10);
        assert_eq!(lower_bound_from_cherns(&[0, 0]).0, 0);
        assert!(lower_bound_from_cherns(&[1, 0]).1.is_some());
        assert_eq!(partial_sums(&[-3, 5, -5, 3]), vec![3, -2, 3]);
        assert_eq!(partial_sums(&[-1, 1]), vec![1]);
    }

    #[test]
    fn spin_bounds() {
        assert_eq!(spin_lower_bound(2).unwrap(), 4);
        assert_eq!(spin_lower_bound(1).unwrap(), 1);
        assert_eq!(spin_lower_bound(4).unwrap(), 20);
        for two_s in 1..=6 {
            assert_eq!(
                lower_bound_from_cherns(&spin_cherns(two_s)).0,
                spin_lower_bound(two_s).unwrap()
            );
        }
    }

    #[test]
    fn parity() {
        assert!(parity_consistent(4, 6));
        assert!(parity_consistent(6, 6));
        assert!(!parity_consistent(3, 6));
    }
}

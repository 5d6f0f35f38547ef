//! Lifted families `f − (λ+λ₀)·1` and their `(n−1)×(n−1)` minor ideals.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::matfam::{MatrixFamily, SymmetryClass};
use crate::numeric::eigvals;
use crate::poly::{Poly, Var, NVARS};

pub const LAMBDA0_TOL: f64 = 1e-9;

/// `fam − (λ + λ₀)·1` as a family in the parameters and `λ`.
pub fn lift(fam: &MatrixFamily, lambda0: &Coeff) -> MatrixFamily {
    let n = fam.n();
    let shift = &Poly::var(Var::L) + &Poly::constant(lambda0.clone());
    let entries = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                fam.entry(i, j) - &shift
            } else {
                fam.entry(i, j).clone()
            }
        })
        .collect();
    // a complex shift breaks coefficientwise hermiticity
    let class = if fam.class() == SymmetryClass::Hermitian && !lambda0.is_real() {
        SymmetryClass::General
    } else {
        fam.class()
    };
    MatrixFamily::new_unchecked(class, n, entries)
}

/// Checks that `λ₀` is an eigenvalue of `fam` at the base point (parameters
/// and `t` set to zero). Returns a warning message when it is not.
pub fn check_lambda0(fam: &MatrixFamily, lambda0: &Coeff, tol: f64) -> Option<String> {
    let zero: [Coeff; NVARS] = Default::default();
    let a0 = fam.evaluate_exact(&zero);
    let shifted = MatrixFamily::new_unchecked(
        SymmetryClass::General,
        fam.n(),
        (0..fam.n() * fam.n())
            .map(|k| {
                let (i, j) = (k / fam.n(), k % fam.n());
                let mut c = a0[i][j].clone();
                if i == j {
                    c -= lambda0;
                }
                Poly::constant(c)
            })
            .collect(),
    );
    let det = determinant(&shifted);
    if det.is_zero() {
        return None;
    }
    let m = fam.evaluate_full(&[Complex64::new(0.0, 0.0); NVARS]);
    let l = lambda0.to_complex();
    let best = eigvals(&m)
        .iter()
        .map(|e| (e - l).norm())
        .fold(f64::INFINITY, f64::min);
    if best <= tol {
        None
    } else {
        Some(format!(
            "λ₀ = {lambda0} is not an eigenvalue of the family at the base point (distance {best:.3e})"
        ))
    }
}

/// Determinants of all row/column-deleted submatrices, memoized on the set
/// of remaining columns.
struct MinorTable<'a> {
    fam: &'a MatrixFamily,
    rows: Vec<usize>,
    memo: HashMap<u32, Poly>,
}

impl<'a> MinorTable<'a> {
    fn new(fam: &'a MatrixFamily, skip_row: Option<usize>) -> Self {
        let rows = (0..fam.n()).filter(|&r| Some(r) != skip_row).collect();
        Self {
            fam,
            rows,
            memo: HashMap::new(),
        }
    }

    /// Determinant of the submatrix on the last `popcount(mask)` rows and
    /// the columns in `mask`.
    fn det(&mut self, mask: u32) -> Poly {
        if mask == 0 {
            return Poly::one();
        }
        if let Some(p) = self.memo.get(&mask) {
            return p.clone();
        }
        let depth = self.rows.len() - mask.count_ones() as usize;
        let r = self.rows[depth];
        let mut acc = Poly::zero();
        let mut sign_pos = true;
        for c in 0..self.fam.n() {
            if mask & (1 << c) == 0 {
                continue;
            }
            let e = self.fam.entry(r, c);
            if !e.is_zero() {
                let sub = self.det(mask & !(1 << c));
                let term = e * &sub;
                acc = if sign_pos { &acc + &term } else { &acc - &term };
            }
            sign_pos = !sign_pos;
        }
        self.memo.insert(mask, acc.clone());
        acc
    }
}

pub fn determinant(fam: &MatrixFamily) -> Poly {
    let full = (1u32 << fam.n()) - 1;
    MinorTable::new(fam, None).det(full)
}

/// All minors `M_ij` (row `i`, column `j` deleted), row-major.
pub fn all_minors(fam: &MatrixFamily) -> Vec<Vec<Poly>> {
    let n = fam.n();
    let full = (1u32 << n) - 1;
    (0..n)
        .map(|i| {
            let mut t = MinorTable::new(fam, Some(i));
            (0..n).map(|j| t.det(full & !(1 << j))).collect()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MinorSystem {
    #[serde(skip)]
    pub lifted: MatrixFamily,
    pub class: SymmetryClass,
    pub lambda0: String,
    /// `(i, j)` labels (0-based) of the generators.
    pub labels: Vec<(usize, usize)>,
    pub generators: Vec<Poly>,
    pub realified: Option<Vec<Poly>>,
}

impl MinorSystem {
    /// Variables the generators live in: the parameters and `λ`.
    pub fn vars(&self) -> Vec<Var> {
        let mut v = self.class.params().to_vec();
        v.push(Var::L);
        v
    }

    pub fn is_homogeneous(&self) -> bool {
        self.generators.iter().all(|g| g.is_zero() || g.is_homogeneous())
    }
}

/// The minor ideal of a lifted family. `lambda0` is recorded for reporting.
pub fn minor_ideal(lifted: &MatrixFamily, lambda0: &Coeff) -> Result<MinorSystem> {
    let n = lifted.n();
    if n < 2 {
        return Err(Error::InvalidArgument("minor ideal needs n ≥ 2".into()));
    }
    let m = all_minors(lifted);
    let mut labels = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let keep = match lifted.class() {
                SymmetryClass::Diagonal => i == j,
                SymmetryClass::Symmetric => i <= j,
                _ => true,
            };
            if keep {
                labels.push((i, j));
            }
        }
    }
    let generators = labels.iter().map(|&(i, j)| m[i][j].clone()).collect();
    Ok(MinorSystem {
        lifted: lifted.clone(),
        class: lifted.class(),
        lambda0: lambda0.to_string(),
        labels,
        generators,
        realified: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CofactorReport {
    pub relations_checked: usize,
    pub labels: Vec<String>,
}

/// Verifies the cofactor identities `Σ_l (−1)^{i+l} f_il M_jl = 0` (`i ≠ j`),
/// their column analogues, and equality of the determinant expansions along
/// consecutive rows and columns: `2(n²−1)` relations.
pub fn check_cofactor_identities(fam: &MatrixFamily) -> Result<CofactorReport> {
    let n = fam.n();
    let m = all_minors(fam);
    let sign = |k: usize| if k % 2 == 0 { Coeff::one() } else { -Coeff::one() };
    let row_exp = |i: usize, j: usize| {
        (0..n).fold(Poly::zero(), |acc, l| {
            &acc + &(fam.entry(i, l) * &m[j][l]).scale(&sign(i + l))
        })
    };
    let col_exp = |i: usize, j: usize| {
        (0..n).fold(Poly::zero(), |acc, l| {
            &acc + &(fam.entry(l, i) * &m[l][j]).scale(&sign(i + l))
        })
    };
    let mut labels = Vec::new();
    let mut check = |label: String, p: Poly| -> Result<()> {
        if !p.is_zero() {
            return Err(Error::IdentityFailed(format!("{label} gives {p}")));
        }
        labels.push(label);
        Ok(())
    };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                check(format!("row {}·cofactors {}", i + 1, j + 1), row_exp(i, j))?;
                check(format!("col {}·cofactors {}", i + 1, j + 1), col_exp(i, j))?;
            }
        }
    }
    for i in 0..n.saturating_sub(1) {
        check(
            format!("det rows {},{}", i + 1, i + 2),
            &row_exp(i, i) - &row_exp(i + 1, i + 1),
        )?;
        check(
            format!("det cols {},{}", i + 1, i + 2),
            &col_exp(i, i) - &col_exp(i + 1, i + 1),
        )?;
    }
    Ok(CofactorReport {
        relations_checked: labels.len(),
        labels,
    })
}

/// Replaces each conjugate pair `m_ij, m_ji` by `m_ij + m_ji` and
/// `i(m_ij − m_ji)`; diagonal minors are kept.
pub fn realify(ms: &MinorSystem) -> Result<MinorSystem> {
    if ms.class != SymmetryClass::Hermitian
        && ms.class != SymmetryClass::Symmetric
        && ms.class != SymmetryClass::Diagonal
    {
        return Err(Error::ClassViolation(
            "realification needs a hermitian family and real λ₀".into(),
        ));
    }
    let lookup: HashMap<(usize, usize), &Poly> =
        ms.labels.iter().copied().zip(ms.generators.iter()).collect();
    let mut out = Vec::new();
    let i = Coeff::i();
    for &(a, b) in &ms.labels {
        if a == b {
            out.push(lookup[&(a, b)].clone());
        } else if a < b {
            let p = lookup[&(a, b)];
            match lookup.get(&(b, a)) {
                Some(q) => {
                    out.push(p + *q);
                    out.push((p - *q).scale(&i));
                }
                // symmetric storage keeps one of the pair
                None => out.push(p.clone()),
            }
        }
    }
    if let Some(bad) = out.iter().find(|p| !p.has_real_coeffs()) {
        return Err(Error::ClassViolation(format!(
            "realified generator {bad} has non-real coefficients"
        )));
    }
    let mut r = ms.clone();
    r.realified = Some(out);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::matfam::{build_diagonal_linear, build_spin1_scaled, spin1_perturbation_1};

    #[test]
    fn lift_examples() {
        let f = build_spin1_scaled();
        let l = lift(&f, &Coeff::zero());
        assert_eq!(l.entry(1, 1), &Poly::parse("-l").unwrap());
        let d = build_diagonal_linear(&[rat(1, 1), rat(2, 1)]).unwrap();
        let l = lift(&d, &Coeff::zero());
        assert_eq!(l.entry(1, 1), &Poly::parse("2*x - l").unwrap());
        let p = f.perturb(&spin1_perturbation_1()).unwrap();
        assert_eq!(lift(&p, &Coeff::zero()).entry(0, 0), &Poly::parse("z - l").unwrap());
    }

    #[test]
    fn lambda0_check() {
        let f = build_spin1_scaled();
        assert!(check_lambda0(&f, &Coeff::zero(), LAMBDA0_TOL).is_none());
        assert!(check_lambda0(&f, &Coeff::from_int(1), LAMBDA0_TOL).is_some());
    }

    #[test]
    fn two_by_two_minors_are_entries() {
        let f = MatrixFamily::parse(SymmetryClass::General, &[vec!["x - l", "y"], vec!["y", "-x - l"]])
            .unwrap();
        let ms = minor_ideal(&f, &Coeff::zero()).unwrap();
        let want: Vec<Poly> = ["-x - l", "y", "y", "x - l"]
            .iter()
            .map(|s| Poly::parse(s).unwrap())
            .collect();
        assert_eq!(ms.generators, want);
    }

    #[test]
    fn spin1_minor_ideal_shape() {
        let l = lift(&build_spin1_scaled(), &Coeff::zero());
        let ms = minor_ideal(&l, &Coeff::zero()).unwrap();
        assert_eq!(ms.generators.len(), 9);
        assert!(ms.generators.iter().all(|g| g.is_homogeneous() && g.degree() == Some(2)));
        let r = realify(&ms).unwrap();
        assert_eq!(r.realified.as_ref().unwrap().len(), 9);
        check_cofactor_identities(&l).unwrap();
    }

    #[test]
    fn diagonal_minors_are_products() {
        let slopes = [rat(1, 1), rat(2, 1), rat(3, 1)];
        let l = lift(&build_diagonal_linear(&slopes).unwrap(), &Coeff::zero());
        let ms = minor_ideal(&l, &Coeff::zero()).unwrap();
        assert_eq!(ms.generators.len(), 3);
        for (i, g) in ms.generators.iter().enumerate() {
            let mut want = Poly::one();
            for (j, a) in slopes.iter().enumerate() {
                if j != i {
                    want = &want * &(&Poly::var(Var::X).scale(&Coeff::from_rational(a.clone())) - &Poly::var(Var::L));
                }
            }
            assert_eq!(g, &want);
        }
    }

    #[test]
    fn realify_conjugate_pair() {
        let f = MatrixFamily::parse(
            SymmetryClass::Hermitian,
            &[vec!["z", "x - i*y"], vec!["x + i*y", "-z"]],
        )
        .unwrap();
        let l = lift(&f, &Coeff::zero());
        let ms = minor_ideal(&l, &Coeff::zero()).unwrap();
        let r = realify(&ms).unwrap().realified.unwrap();
        // M_12 = x + iy, M_21 = x − iy
        assert!(r.contains(&Poly::parse("2*x").unwrap()));
        assert!(r.contains(&Poly::parse("-2*y").unwrap()));
    }
}

//! Polynomial matrix families, presets and perturbations.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Coeff, GaussianRational};
use crate::numeric::CMat;
use crate::poly::{NumPoly, Poly, Var, NVARS};

/// Numeric matrix.
pub type Matrix = CMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryClass {
    Hermitian,
    Symmetric,
    Diagonal,
    General,
}

impl SymmetryClass {
    /// Parameter count matching the codimension of the degeneracy locus.
    pub fn arity(self) -> usize {
        match self {
            SymmetryClass::Hermitian | SymmetryClass::General => 3,
            SymmetryClass::Symmetric => 2,
            SymmetryClass::Diagonal => 1,
        }
    }

    pub fn params(self) -> &'static [Var] {
        &Var::PARAMS[..self.arity()]
    }

    pub fn name(self) -> &'static str {
        match self {
            SymmetryClass::Hermitian => "hermitian",
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Diagonal => "diagonal",
            SymmetryClass::General => "general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hermitian" | "herm" | "hermitian-general" => Ok(SymmetryClass::Hermitian),
            "symmetric" | "real-symmetric" | "symm" => Ok(SymmetryClass::Symmetric),
            "diagonal" | "diag" => Ok(SymmetryClass::Diagonal),
            "general" | "general-complex" => Ok(SymmetryClass::General),
            _ => Err(Error::InvalidArgument(format!("unknown class '{s}'"))),
        }
    }
}

/// `n × n` grid of [`Poly`] entries with a symmetry tag.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixFamily {
    n: usize,
    class: SymmetryClass,
    entries: Vec<Poly>,
}

#[derive(Serialize, Deserialize)]
struct FamilyText {
    class: SymmetryClass,
    entries: Vec<Vec<String>>,
}

impl Serialize for MatrixFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyText {
            class: self.class,
            entries: self.rows_as_strings(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let t = FamilyText::deserialize(d)?;
        MatrixFamily::parse(t.class, &t.entries).map_err(serde::de::Error::custom)
    }
}

impl MatrixFamily {
    /// Validated constructor.
    pub fn new(class: SymmetryClass, rows: Vec<Vec<Poly>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("entries must form a nonempty square grid".into()));
        }
        let fam = Self {
            n,
            class,
            entries: rows.into_iter().flatten().collect(),
        };
        fam.validate()?;
        Ok(fam)
    }

    pub(crate) fn new_unchecked(class: SymmetryClass, n: usize, entries: Vec<Poly>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        Self { n, class, entries }
    }

    /// Parse a grid of entry strings.
    pub fn parse<S: AsRef<str>>(class: SymmetryClass, rows: &[Vec<S>]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, s) in row.iter().enumerate() {
                r.push(Poly::parse(s.as_ref()).map_err(|e| {
                    Error::InvalidArgument(format!("entry ({},{}): {e}", i + 1, j + 1))
                })?);
            }
            out.push(r);
        }
        Self::new(class, out)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let params = self.class.params();
        for p in &self.entries {
            for v in p.variables() {
                if matches!(v, Var::X | Var::Y | Var::Z) && !params.contains(&v) {
                    return Err(Error::ClassViolation(format!(
                        "{} family of arity {} uses variable {}",
                        self.class.name(),
                        self.class.arity(),
                        v.name()
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let a = self.entry(i, j);
                let b = self.entry(j, i);
                match self.class {
                    SymmetryClass::Hermitian => {
                        if *b != a.conj() {
                            return Err(Error::ClassViolation(format!(
                                "entry ({},{}) is not the conjugate of ({},{})",
                                j + 1,
                                i + 1,
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                    SymmetryClass::Symmetric => {
                        if !a.has_real_coeffs() || a != b {
                            return Err(Error::ClassViolation(format!(
                                "entry ({},{}) breaks real symmetry",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                    SymmetryClass::Diagonal => {
                        if i != j && !a.is_zero() {
                            return Err(Error::ClassViolation(format!(
                                "off-diagonal entry ({},{}) is nonzero",
                                i + 1,
                                j + 1
                            )));
                        }
                        if !a.has_real_coeffs() {
                            return Err(Error::ClassViolation("diagonal entries must be real".into()));
                        }
                    }
                    SymmetryClass::General => {}
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn arity(&self) -> usize {
        self.class.arity()
    }

    pub fn params(&self) -> &'static [Var] {
        self.class.params()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Poly>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn rows_as_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|p| p.to_string()).collect())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        Self::new_unchecked(self.class, self.n, self.entries.iter().map(f).collect())
    }

    pub fn with_class(&self, class: SymmetryClass) -> Self {
        Self::new_unchecked(class, self.n, self.entries.clone())
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.entries.iter().any(|p| p.degree_in(v) > 0)
    }

    /// All entries are homogeneous polynomials of one common degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for p in self.entries.iter().filter(|p| !p.is_zero()) {
            if !p.is_homogeneous() {
                return None;
            }
            match deg {
                None => deg = p.degree(),
                Some(d) if Some(d) != p.degree() => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    /// Substitute `t` by an exact value.
    pub fn at_t(&self, t: &Coeff) -> Self {
        let tp = Poly::constant(t.clone());
        self.map(|p| p.subs(Var::T, &tp))
    }

    /// Apply a linear change of parameters `x_i ↦ Σ_j m[i][j] x_j`.
    pub fn linear_change(&self, m: &[Vec<Coeff>]) -> Result<Self> {
        let params = self.params();
        if m.len() != params.len() || m.iter().any(|r| r.len() != params.len()) {
            return Err(Error::Arity {
                expected: params.len(),
                got: m.len(),
            });
        }
        let mut images: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(Var::from_idx(i)));
        for (i, v) in params.iter().enumerate() {
            let mut img = Poly::zero();
            for (j, w) in params.iter().enumerate() {
                img = &img + &Poly::var(*w).scale(&m[i][j]);
            }
            images[v.idx()] = img;
        }
        Ok(self.map(|p| p.compose(&images)))
    }

    /// Numeric evaluation. `point` lists the parameters, followed by `λ`
    /// and then `t` when those occur in the entries.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Matrix> {
        let mut vars: Vec<Var> = self.params().to_vec();
        for v in [Var::L, Var::T] {
            if self.contains_var(v) {
                vars.push(v);
            }
        }
        if point.len() != vars.len() {
            return Err(Error::Arity {
                expected: vars.len(),
                got: point.len(),
            });
        }
        let mut full = [Complex64::new(0.0, 0.0); NVARS];
        for (v, z) in vars.iter().zip(point) {
            full[v.idx()] = *z;
        }
        Ok(self.evaluate_full(&full))
    }

    pub fn evaluate_real(&self, point: &[f64]) -> Result<Matrix> {
        let p: Vec<Complex64> = point.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate(&p)
    }

    /// Evaluation with all five variables given.
    pub fn evaluate_full(&self, full: &[Complex64; NVARS]) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(full))
    }

    /// Exact evaluation; entries of the result are field elements.
    pub fn evaluate_exact(&self, full: &[Coeff; NVARS]) -> Vec<Vec<Coeff>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j).eval_exact(full)).collect())
            .collect()
    }

    /// `self + t · dir`. The direction must have the same size and respect
    /// the symmetry class.
    pub fn perturb(&self, dir: &MatrixFamily) -> Result<Self> {
        if dir.n != self.n {
            return Err(Error::InvalidArgument(format!(
                "perturbation size {} does not match family size {}",
                dir.n, self.n
            )));
        }
        let check = Self::new_unchecked(self.class, dir.n, dir.entries.clone());
        check.validate()?;
        let t = Poly::var(Var::T);
        let entries = self
            .entries
            .iter()
            .zip(&dir.entries)
            .map(|(a, b)| a + &(&t * b))
            .collect();
        Ok(Self::new_unchecked(self.class, self.n, entries))
    }

    /// Add a constant matrix (given exactly) to the family.
    pub fn add_constant(&self, m: &[Vec<Coeff>]) -> Result<Self> {
        let rows: Vec<Vec<Poly>> = m
            .iter()
            .map(|r| r.iter().map(|c| Poly::constant(c.clone())).collect())
            .collect();
        let dir = MatrixFamily::new(self.class, rows)?;
        let entries = self
            .entries
            .iter()
            .zip(&dir.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::new_unchecked(self.class, self.n, entries))
    }
}

/// Floating-point copy of a family with `t` fixed, for fast evaluation.
#[derive(Clone, Debug)]
pub struct NumericFamily {
    n: usize,
    arity: usize,
    t: f64,
    entries: Vec<NumPoly>,
}

impl NumericFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn full(&self, params: &[Complex64]) -> [Complex64; NVARS] {
        let mut full = [Complex64::new(0.0, 0.0); NVARS];
        full[..self.arity].copy_from_slice(&params[..self.arity]);
        full[Var::T.idx()] = Complex64::new(self.t, 0.0);
        full
    }

    pub fn at(&self, params: &[f64]) -> Matrix {
        let p: Vec<Complex64> = params.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.at_complex(&p)
    }

    pub fn at_complex(&self, params: &[Complex64]) -> Matrix {
        let full = self.full(params);
        Matrix::from_fn(self.n, self.n, |i, j| self.entries[i * self.n + j].eval(&full))
    }

    /// Partial derivative of the matrix with respect to parameter `k`.
    pub fn derivative(&self, k: usize) -> NumericFamily {
        let v = Var::from_idx(k);
        NumericFamily {
            n: self.n,
            arity: self.arity,
            t: self.t,
            entries: self.entries.iter().map(|p| p.derivative(v)).collect(),
        }
    }
}

impl MatrixFamily {
    pub fn numeric(&self, t: f64) -> NumericFamily {
        NumericFamily {
            n: self.n,
            arity: self.arity(),
            t,
            entries: self.entries.iter().map(Poly::to_num).collect(),
        }
    }
}

fn cf(n: i64) -> Coeff {
    Coeff::from_int(n)
}

fn var(v: Var) -> Poly {
    Poly::var(v)
}

/// Spin-`s` family `x·Sx + y·Sy + z·Sz` with `two_s = 2s`.
pub fn build_spin_family(two_s: u32) -> Result<MatrixFamily> {
    if two_s == 0 {
        return Err(Error::InvalidArgument("spin must be positive".into()));
    }
    let k = two_s as usize + 1;
    let ts = two_s as i64;
    // row r carries m = s - r, i.e. 2m = ts - 2r
    let twice_m = |r: usize| ts - 2 * r as i64;
    let mut rows = vec![vec![Poly::zero(); k]; k];
    let x_minus_iy = &var(Var::X) - &var(Var::Y).scale(&Coeff::i());
    let x_plus_iy = &var(Var::X) + &var(Var::Y).scale(&Coeff::i());
    for r in 0..k {
        rows[r][r] = var(Var::Z).scale(&Coeff::from_ratio(twice_m(r), 2));
        if r + 1 < k {
            // (S+)_{r, r+1} = sqrt(s(s+1) - b(b+1)) with b = m(r+1)
            let tb = twice_m(r + 1);
            let num = (ts * (ts + 2) - tb * (tb + 2)) as u64;
            // sqrt(num / 4) / 2 from Sx, Sy halves
            let c = Coeff::radical(GaussianRational::from_ratio(1, 4), num);
            rows[r][r + 1] = x_minus_iy.scale(&c);
            rows[r + 1][r] = x_plus_iy.scale(&c);
        }
    }
    MatrixFamily::new(SymmetryClass::Hermitian, rows)
}

/// Spin-`s` operators `(Sx, Sy, Sz)` as numeric matrices.
pub fn spin_operators(two_s: u32) -> Result<[Matrix; 3]> {
    let f = build_spin_family(two_s)?;
    let e = |i: usize| {
        let mut p = [Complex64::new(0.0, 0.0); 3];
        p[i] = Complex64::new(1.0, 0.0);
        f.evaluate(&p)
    };
    Ok([e(0)?, e(1)?, e(2)?])
}

/// The scaled spin-1 family with rows `(z, x−iy, 0 / x+iy, 0, x−iy / 0, x+iy, −z)`.
pub fn build_spin1_scaled() -> MatrixFamily {
    MatrixFamily::parse(
        SymmetryClass::Hermitian,
        &[
            vec!["z", "x - i*y", "0"],
            vec!["x + i*y", "0", "x - i*y"],
            vec!["0", "x + i*y", "-z"],
        ],
    )
    .expect("valid preset")
}

/// Constant perturbation direction `[[0,1,0],[1,0,−1],[0,−1,0]]`.
pub fn spin1_perturbation_1() -> MatrixFamily {
    MatrixFamily::parse(
        SymmetryClass::Hermitian,
        &[vec!["0", "1", "0"], vec!["1", "0", "-1"], vec!["0", "-1", "0"]],
    )
    .expect("valid preset")
}

/// Direction whose `t`-multiple is `[[0,0,t],[0,−t+t³−2tz,0],[t,0,0]]`.
pub fn spin1_perturbation_2() -> MatrixFamily {
    MatrixFamily::parse(
        SymmetryClass::Hermitian,
        &[
            vec!["0", "0", "1"],
            vec!["0", "-1 + t^2 - 2*z", "0"],
            vec!["1", "0", "0"],
        ],
    )
    .expect("valid preset")
}

fn pauli(i: usize) -> [[Coeff; 2]; 2] {
    let z = Coeff::zero();
    let one = cf(1);
    match i {
        0 => [[one.clone(), z.clone()], [z, one]],
        1 => [[z.clone(), one.clone()], [one, z]],
        2 => [[z.clone(), -Coeff::i()], [Coeff::i(), z]],
        _ => [[one.clone(), z.clone()], [z, -one]],
    }
}

/// Kronecker product `σ_a ⊗ τ_b` as a 4×4 exact matrix (index `2a+b`).
pub fn sigma_tau(a: usize, b: usize) -> Vec<Vec<Coeff>> {
    let s = pauli(a);
    let t = pauli(b);
    let mut m = vec![vec![Coeff::zero(); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = &s[i][j] * &t[k][l];
                }
            }
        }
    }
    m
}

/// The 4×4 band-structure family `H_(α)` built from `σ_i ⊗ τ_j`.
pub fn build_band_family(alpha: &[BigRational; 3]) -> MatrixFamily {
    let s3 = Coeff::radical(GaussianRational::one(), 3);
    let a: Vec<Coeff> = alpha.iter().map(|q| Coeff::from_rational(q.clone())).collect();
    let (x, y, z) = (var(Var::X), var(Var::Y), var(Var::Z));
    // (coefficient, variable, sigma index, tau index); 0 = identity, 3 = σz
    let mut terms: Vec<(Coeff, &Poly, usize, usize)> = Vec::new();
    let a0 = &a[0];
    terms.push((a0 * &cf(2), &x, 1, 3));
    terms.push((-(a0 * &s3), &y, 1, 0));
    terms.push((-a0.clone(), &y, 2, 0));
    terms.push((a0.clone(), &z, 1, 1));
    terms.push((a0 * &s3, &z, 2, 1));
    let a1 = &a[1];
    terms.push((-(a1 * &cf(2)), &x, 2, 3));
    terms.push((-a1.clone(), &y, 1, 0));
    terms.push((a1 * &s3, &y, 2, 0));
    terms.push((a1 * &s3, &z, 1, 1));
    terms.push((-a1.clone(), &z, 2, 1));
    let a2 = &(&a[2] * &cf(2));
    terms.push((a2.clone(), &x, 3, 1));
    terms.push((a2.clone(), &y, 0, 2));
    terms.push((a2.clone(), &z, 3, 3));
    let mut rows = vec![vec![Poly::zero(); 4]; 4];
    for (c, v, si, ti) in terms {
        if c.is_zero() {
            continue;
        }
        let m = sigma_tau(si, ti);
        for i in 0..4 {
            for j in 0..4 {
                if !m[i][j].is_zero() {
                    rows[i][j] = &rows[i][j] + &v.scale(&(&c * &m[i][j]));
                }
            }
        }
    }
    MatrixFamily::new(SymmetryClass::Hermitian, rows).expect("band family is hermitian")
}

/// `diag(a_1 x, …, a_k x)`; slopes must be pairwise distinct.
pub fn build_diagonal_linear(slopes: &[BigRational]) -> Result<MatrixFamily> {
    for i in 0..slopes.len() {
        for j in i + 1..slopes.len() {
            if slopes[i] == slopes[j] {
                return Err(Error::InvalidArgument(format!(
                    "repeated slope {}: the degeneracy at 0 is not isolated",
                    slopes[i]
                )));
            }
        }
    }
    let k = slopes.len();
    let mut rows = vec![vec![Poly::zero(); k]; k];
    for (i, a) in slopes.iter().enumerate() {
        rows[i][i] = var(Var::X).scale(&Coeff::from_rational(a.clone()));
    }
    MatrixFamily::new(SymmetryClass::Diagonal, rows)
}

/// `x·A + y·B` for real symmetric `A`, `B`.
pub fn build_symmetric_linear(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Result<MatrixFamily> {
    let k = a.len();
    if b.len() != k || a.iter().chain(b).any(|r| r.len() != k) {
        return Err(Error::InvalidArgument("A and B must be square of equal size".into()));
    }
    let mut rows = vec![vec![Poly::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let ca = Coeff::from_rational(a[i][j].clone());
            let cb = Coeff::from_rational(b[i][j].clone());
            rows[i][j] = &var(Var::X).scale(&ca) + &var(Var::Y).scale(&cb);
        }
    }
    MatrixFamily::new(SymmetryClass::Symmetric, rows)
}

/// Linear hermitian or general family `x·A + y·B + z·C`.
pub fn build_linear3(class: SymmetryClass, mats: &[Vec<Vec<Coeff>>; 3]) -> Result<MatrixFamily> {
    let k = mats[0].len();
    let mut rows = vec![vec![Poly::zero(); k]; k];
    for (m, v) in mats.iter().zip([Var::X, Var::Y, Var::Z]) {
        for i in 0..k {
            for j in 0..k {
                rows[i][j] = &rows[i][j] + &var(v).scale(&m[i][j]);
            }
        }
    }
    MatrixFamily::new(class, rows)
}

/// True when `α` lies on one of the loci where the band family is known to
/// be degenerate along curves: `α₂ = ±√(α₀²+α₁²)`, `α₂ = 0`, `α₀ = α₁ = 0`.
pub fn band_alpha_exceptional(alpha: &[BigRational; 3]) -> bool {
    let r2 = &alpha[0] * &alpha[0] + &alpha[1] * &alpha[1];
    alpha[2].is_zero() || r2.is_zero() || &alpha[2] * &alpha[2] == r2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::numeric::{c, eigvalsh, max_abs};

    #[test]
    fn spin_half_sz() {
        let f = build_spin_family(1).unwrap();
        let m = f.evaluate_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!((m[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - c(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spin_commutators() {
        for two_s in 1..=4 {
            let [sx, sy, sz] = spin_operators(two_s).unwrap();
            let comm = &sx * &sy - &sy * &sx;
            assert!(max_abs(&(comm - sz.scale(1.0) * c(0.0, 1.0))) < 1e-12);
        }
    }

    #[test]
    fn spin1_eigenvalues() {
        let f = build_spin_family(2).unwrap();
        let (x, y, z) = (0.3, -0.7, 1.1);
        let r = (x * x + y * y + z * z as f64).sqrt();
        let ev = eigvalsh(&f.evaluate_real(&[x, y, z]).unwrap());
        for (a, b) in ev.iter().zip([-r, 0.0, r]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_spin1_preset() {
        let f = build_spin1_scaled();
        assert_eq!(f.entry(0, 1), &Poly::parse("x - i*y").unwrap());
        assert!(f.entry(1, 1).is_zero());
        let ev = eigvalsh(&f.evaluate_real(&[1.0, 0.0, 0.0]).unwrap());
        let s2 = 2f64.sqrt();
        for (a, b) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((a - b).abs() < 1e-12);
        }
        // degenerate point of the first perturbation at t = 1
        let p1 = f.perturb(&spin1_perturbation_1()).unwrap();
        let ev = eigvalsh(&p1.evaluate_real(&[1.0, 0.0, s2, 1.0]).unwrap());
        assert!((ev[0] + s2).abs() < 1e-12 && (ev[1] + s2).abs() < 1e-12);
    }

    #[test]
    fn perturbation_presets() {
        let f = build_spin1_scaled();
        let p1 = f.perturb(&spin1_perturbation_1()).unwrap();
        assert_eq!(p1.entry(0, 1), &Poly::parse("x - i*y + t").unwrap());
        let p2 = f.perturb(&spin1_perturbation_2()).unwrap();
        assert_eq!(p2.entry(1, 1), &Poly::parse("-t + t^3 - 2*t*z").unwrap());
        let zero = MatrixFamily::new(SymmetryClass::Hermitian, vec![vec![Poly::zero(); 3]; 3]).unwrap();
        assert_eq!(f.perturb(&zero).unwrap(), f);
        let bad = MatrixFamily::parse(
            SymmetryClass::General,
            &[vec!["0", "1", "0"], vec!["0", "0", "0"], vec!["0", "0", "0"]],
        )
        .unwrap();
        assert!(matches!(f.perturb(&bad), Err(Error::ClassViolation(_))));
    }

    #[test]
    fn band_family_coefficients() {
        let f = build_band_family(&[rat(1, 1), rat(0, 1), rat(0, 1)]);
        // coefficient of k_x is 2 σx⊗τz
        let m = sigma_tau(1, 3);
        for i in 0..4 {
            for j in 0..4 {
                let coeff = f.entry(i, j).coeff(&[1, 0, 0, 0, 0]);
                assert_eq!(coeff, m[i][j].scale_int(2));
            }
        }
        let g = build_band_family(&[rat(0, 1), rat(0, 1), rat(1, 1)]);
        let m = sigma_tau(3, 3);
        for i in 0..4 {
            assert_eq!(g.entry(i, i).coeff(&[0, 0, 1, 0, 0]), m[i][i].scale_int(2));
        }
        let h = build_band_family(&[rat(2, 3), rat(-1, 5), rat(7, 4)]);
        assert!(max_abs(&h.evaluate_real(&[0.0, 0.0, 0.0]).unwrap()) == 0.0);
    }

    #[test]
    fn diagonal_and_symmetric_builders() {
        let d = build_diagonal_linear(&[rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(d.entry(1, 1), &Poly::parse("2*x").unwrap());
        let m = d.evaluate_real(&[1.0]).unwrap();
        assert!((m[(2, 2)] - c(3.0, 0.0)).norm() == 0.0);
        assert!(build_diagonal_linear(&[rat(1, 1), rat(1, 1)]).is_err());
        let i2 = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]];
        let b = vec![vec![rat(0, 1), rat(2, 1)], vec![rat(2, 1), rat(-1, 1)]];
        let s = build_symmetric_linear(&i2, &b).unwrap();
        assert_eq!(s.entry(0, 1), &Poly::parse("2*y").unwrap());
        assert_eq!(s.entry(1, 1), &Poly::parse("x - y").unwrap());
    }

    #[test]
    fn exact_and_float_evaluation_agree() {
        let spin = build_spin_family(3).unwrap();
        let f = spin.perturb(&spin.map(|p| p.subs(Var::X, &Poly::one()))).unwrap();
        let pt = [rat(1, 3), rat(-2, 7), rat(5, 11)];
        let mut full: [Coeff; NVARS] = Default::default();
        for i in 0..3 {
            full[i] = Coeff::from_rational(pt[i].clone());
        }
        full[4] = Coeff::from_ratio(1, 10);
        let exact = f.evaluate_exact(&full);
        let num = f.evaluate_full(&std::array::from_fn(|i| full[i].to_complex()));
        for i in 0..f.n() {
            for j in 0..f.n() {
                assert!((exact[i][j].to_complex() - num[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn serde_roundtrip() {
        let f = build_spin1_scaled();
        let s = serde_json::to_string(&f).unwrap();
        let g: MatrixFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}

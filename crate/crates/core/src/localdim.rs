//! Dimensions of local quotient algebras `O_m/J`.
//!
//! Homogeneous ideals use graded Macaulay blocks; everything else goes
//! through the Macaulay dual space at the origin. All ranks are exact.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{approx_rational, Coeff};
use crate::linalg::{self, Echelon, SparseRow};
use crate::matfam::MatrixFamily;
use crate::minors::{check_lambda0, lift, minor_ideal, MinorSystem, LAMBDA0_TOL};
use crate::numeric::eigvals;
use crate::poly::{
    monomial_string, monomials_of_degree, monomials_up_to, var_exps, Exps, Poly, Var, NVARS,
};

pub const DEFAULT_GENERAL_CAP: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Isolated,
    NotIsolated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityResult {
    /// Certified dimension; `None` unless the verdict is `Isolated`.
    pub total: Option<usize>,
    pub hilbert: Vec<usize>,
    pub basis: Vec<Exps>,
    pub degree_cap_used: u32,
    pub verdict: Verdict,
    /// Curve through the origin on which every generator vanishes.
    pub witness: Option<String>,
    pub warnings: Vec<String>,
}

impl MultiplicityResult {
    pub fn basis_strings(&self) -> Vec<String> {
        self.basis.iter().map(monomial_string).collect()
    }

    /// Lower bound from the computed part of the Hilbert sequence.
    pub fn partial_sum(&self) -> usize {
        self.hilbert.iter().sum()
    }
}

impl Serialize for MultiplicityResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MultiplicityResult", 7)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("hilbert", &self.hilbert)?;
        st.serialize_field("basis", &self.basis_strings())?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("cap", &self.degree_cap_used)?;
        st.serialize_field("witness", &self.witness)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

fn index_of(monos: &[Exps]) -> HashMap<Exps, usize> {
    monos.iter().enumerate().map(|(i, m)| (*m, i)).collect()
}

fn row_of(p: &Poly, index: &HashMap<Exps, usize>) -> SparseRow {
    p.terms()
        .filter_map(|(e, c)| index.get(e).map(|&i| (i, c.clone())))
        .collect()
}

fn unit(i: usize) -> SparseRow {
    std::iter::once((i, Coeff::one())).collect()
}

/// Graded Hilbert function of `C[vars]/J` for homogeneous generators.
pub fn graded_dimension(gens: &[Poly], vars: &[Var], cap: u32) -> Result<MultiplicityResult> {
    let gens: Vec<&Poly> = gens.iter().filter(|g| !g.is_zero()).collect();
    if let Some(g) = gens.iter().find(|g| !g.is_homogeneous()) {
        return Err(Error::InvalidArgument(format!("generator {g} is not homogeneous")));
    }
    if let Some(g) = gens.iter().find(|g| !g.uses_only(vars)) {
        return Err(Error::InvalidArgument(format!("generator {g} uses extra variables")));
    }
    let mut hilbert = Vec::new();
    let mut basis = Vec::new();
    let mut first_zero = None;
    for d in 0..=cap {
        let monos = monomials_of_degree(vars, d);
        let index = index_of(&monos);
        let rows: Vec<SparseRow> = gens
            .iter()
            .filter(|g| g.degree().unwrap() <= d)
            .flat_map(|g| {
                monomials_of_degree(vars, d - g.degree().unwrap())
                    .into_iter()
                    .map(|m| row_of(&g.mul_monomial(&m), &index))
            })
            .collect();
        let h = match linalg::certified_kernel(&rows, monos.len()) {
            Some((rank, kernel)) => {
                // complement monomials: kernel columns independent of earlier picks
                let mut picked = Echelon::new();
                for (i, m) in monos.iter().enumerate() {
                    if picked.rank() == kernel.len() {
                        break;
                    }
                    let col: SparseRow = kernel
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| !v[i].is_zero())
                        .map(|(j, v)| (j, v[i].clone()))
                        .collect();
                    if picked.insert(col) {
                        basis.push(*m);
                    }
                }
                monos.len() - rank
            }
            None => {
                let mut ech = Echelon::new();
                for row in rows {
                    ech.insert(row);
                    if ech.rank() == monos.len() {
                        break;
                    }
                }
                let h = monos.len() - ech.rank();
                let mut found = 0;
                for (i, m) in monos.iter().enumerate() {
                    if found == h {
                        break;
                    }
                    if ech.insert(unit(i)) {
                        basis.push(*m);
                        found += 1;
                    }
                }
                h
            }
        };
        hilbert.push(h);
        match first_zero {
            None if h == 0 => first_zero = Some(d),
            Some(_) if h == 0 => {
                hilbert.truncate(hilbert.len() - 2);
                let total = hilbert.iter().sum();
                return Ok(MultiplicityResult {
                    total: Some(total),
                    hilbert,
                    basis,
                    degree_cap_used: cap,
                    verdict: Verdict::Isolated,
                    witness: None,
                    warnings: vec![],
                });
            }
            _ => {}
        }
    }
    Ok(MultiplicityResult {
        total: None,
        hilbert,
        basis,
        degree_cap_used: cap,
        verdict: Verdict::Inconclusive,
        witness: None,
        warnings: vec![],
    })
}

/// Local algebra at the origin presented through its dual space.
#[derive(Clone, Debug)]
pub struct DualSpace {
    /// Column monomials (degree `≤ order`).
    pub monos: Vec<Exps>,
    /// Basis of functionals, as coefficient vectors over `monos`.
    pub functionals: Vec<Vec<Coeff>>,
    pub order: u32,
    pub hilbert: Vec<usize>,
}

impl DualSpace {
    pub fn dim(&self) -> usize {
        self.functionals.len()
    }

    /// Values of all functionals on `p`.
    pub fn evaluate(&self, p: &Poly) -> Vec<Coeff> {
        let index = index_of(&self.monos);
        let mut v = vec![Coeff::zero(); self.dim()];
        for (e, c) in p.terms() {
            if let Some(&col) = index.get(e) {
                for (k, f) in self.functionals.iter().enumerate() {
                    if !f[col].is_zero() {
                        v[k] += &(c * &f[col]);
                    }
                }
            }
        }
        v
    }

    /// Greedy monomial basis of the quotient among `candidates` (tried in
    /// order).
    pub fn monomial_basis(&self, candidates: &[Exps]) -> Vec<Exps> {
        let mut ech = Echelon::new();
        let mut out = Vec::new();
        for m in candidates {
            if out.len() == self.dim() {
                break;
            }
            let v = self.evaluate(&Poly::monomial(*m, Coeff::one()));
            if ech.insert(linalg::dense_to_sparse(&v)) {
                out.push(*m);
            }
        }
        out
    }

    /// Coordinates of `[p]` in the classes of `basis`.
    pub fn coordinates(&self, basis: &[Exps], p: &Poly) -> Option<Vec<Coeff>> {
        let cols: Vec<Vec<Coeff>> = basis
            .iter()
            .map(|m| self.evaluate(&Poly::monomial(*m, Coeff::one())))
            .collect();
        let a: Vec<Vec<Coeff>> = (0..self.dim())
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        linalg::solve(&a, &self.evaluate(p))
    }
}

/// Dual space of `J` at the origin, grown order by order until its
/// dimension stabilizes. `None` when still growing at `cap`.
pub fn dual_space(gens: &[Poly], vars: &[Var], cap: u32) -> (Option<DualSpace>, Vec<usize>) {
    let gens: Vec<&Poly> = gens.iter().filter(|g| !g.is_zero()).collect();
    let mut dims: Vec<usize> = Vec::new();
    for d in 0..=cap {
        let monos = monomials_up_to(vars, d);
        let index = index_of(&monos);
        let mut ech = Echelon::new();
        'fill: for g in &gens {
            let low = g.order().unwrap();
            if low > d {
                continue;
            }
            for k in 0..=d - low {
                for m in monomials_of_degree(vars, k) {
                    ech.insert(row_of(&g.mul_monomial(&m).truncate(d), &index));
                    if ech.rank() == monos.len() {
                        break 'fill;
                    }
                }
            }
        }
        let dim = monos.len() - ech.rank();
        let stable = d > 0 && dims.last() == Some(&dim);
        dims.push(dim);
        if stable || dim == 0 {
            let hilbert: Vec<usize> = dims
                .iter()
                .enumerate()
                .map(|(i, &v)| if i == 0 { v } else { v - dims[i - 1] })
                .take(if stable { d as usize } else { d as usize + 1 })
                .collect();
            let functionals = ech.kernel(monos.len());
            return (
                Some(DualSpace {
                    monos,
                    functionals,
                    order: d,
                    hilbert: hilbert.clone(),
                }),
                hilbert,
            );
        }
    }
    let hilbert = dims
        .iter()
        .enumerate()
        .map(|(i, &v)| if i == 0 { v } else { v - dims[i - 1] })
        .collect();
    (None, hilbert)
}

/// `dim O_m/J` at the origin for arbitrary generators.
pub fn local_multiplicity(gens: &[Poly], vars: &[Var], cap: u32) -> Result<MultiplicityResult> {
    if let Some(g) = gens.iter().find(|g| !g.uses_only(vars)) {
        return Err(Error::InvalidArgument(format!("generator {g} uses extra variables")));
    }
    let (ds, hilbert) = dual_space(gens, vars, cap);
    Ok(match ds {
        Some(ds) => {
            let candidates = monomials_up_to(vars, ds.order);
            let basis = ds.monomial_basis(&candidates);
            MultiplicityResult {
                total: Some(ds.dim()),
                hilbert,
                basis,
                degree_cap_used: cap,
                verdict: Verdict::Isolated,
                witness: None,
                warnings: vec![],
            }
        }
        None => MultiplicityResult {
            total: None,
            hilbert,
            basis: vec![],
            degree_cap_used: cap,
            verdict: Verdict::Inconclusive,
            witness: None,
            warnings: vec![],
        },
    })
}

/// Number of eigenvalues of `fam` at the base point within `tol` of `λ₀`.
pub fn cluster_size(fam: &MatrixFamily, lambda0: &Coeff, tol: f64) -> usize {
    let m = fam.evaluate_full(&[Complex64::new(0.0, 0.0); NVARS]);
    let l = lambda0.to_complex();
    eigvals(&m).iter().filter(|e| (*e - l).norm() <= tol).count()
}

/// Default degree cap: `2k − 2` for homogeneous minor systems of a `k`-fold
/// point, 12 otherwise.
pub fn default_cap(fam: &MatrixFamily, lambda0: &Coeff, homogeneous: bool) -> u32 {
    if homogeneous {
        let k = cluster_size(fam, lambda0, 1e-6) as u32;
        (2 * k).saturating_sub(2).max(2)
    } else {
        DEFAULT_GENERAL_CAP
    }
}

fn rationalize(z: Complex64) -> Vec<Coeff> {
    let mut out = Vec::new();
    if let Some(c) = Coeff::approximate(z, 1_000_000, 1e-9) {
        out.push(c);
    }
    if z.im.abs() < 1e-9 && z.re.abs() > 1e-9 {
        if let Some(q) = approx_rational(z.re * z.re, 1_000_000, 1e-8) {
            if let Some(r) = Coeff::sqrt_rational(&q) {
                out.push(if z.re < 0.0 { -r } else { r });
            }
        }
    }
    out
}

fn line_directions(m: usize) -> Vec<Vec<i64>> {
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    for i in 0..m {
        let mut d = vec![0; m];
        d[i] = 1;
        dirs.push(d);
    }
    for i in 0..m {
        for j in i + 1..m {
            for s in [1, -1] {
                let mut d = vec![0; m];
                d[i] = 1;
                d[j] = s;
                dirs.push(d);
            }
        }
    }
    if m == 3 {
        for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            dirs.push(vec![1, a, b]);
        }
        for d in [[1, 2, 0], [2, 1, 0], [0, 1, 2], [0, 2, 1], [1, 0, 2], [2, 0, 1]] {
            dirs.push(d.to_vec());
        }
    }
    dirs.truncate(20);
    dirs
}

/// Looks for a rational line `s ↦ (s·d, μ·s^deg)` on which every generator
/// vanishes identically. Only meaningful for homogeneous families with
/// `λ₀ = 0` at a zero base matrix.
pub fn find_curve_witness(fam: &MatrixFamily, gens: &[Poly]) -> Option<String> {
    let deg = fam.homogeneous_degree()?;
    let params = fam.params();
    if deg == 1 {
        if let Some(w) = linear_kernel_witness(params, gens) {
            return Some(w);
        }
    }
    for d in line_directions(params.len()) {
        let point: Vec<Complex64> = d.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
        let Ok(m) = fam.evaluate(&point) else {
            continue;
        };
        let ev = eigvals(&m);
        let scale = ev.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let mut candidates: Vec<Complex64> = Vec::new();
        for i in 0..ev.len() {
            for j in i + 1..ev.len() {
                if (ev[i] - ev[j]).norm() <= 1e-6 * scale {
                    candidates.push((ev[i] + ev[j]) / 2.0);
                }
            }
        }
        for mu in candidates {
            for mu_exact in rationalize(mu) {
                let s = Poly::var(Var::T);
                let mut images: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(Var::from_idx(i)));
                for (v, &dv) in params.iter().zip(&d) {
                    images[v.idx()] = s.scale(&Coeff::from_int(dv));
                }
                images[Var::L.idx()] = s.pow(deg).scale(&mu_exact);
                if gens.iter().all(|g| g.compose(&images).is_zero()) {
                    let dir: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                    return Some(format!(
                        "params = s·({}), λ = {}·s^{}",
                        dir.join(", "),
                        mu_exact,
                        deg
                    ));
                }
            }
        }
    }
    None
}

/// Lines along the common kernel of the linear parts of the generators.
fn linear_kernel_witness(params: &[Var], gens: &[Poly]) -> Option<String> {
    let mut vars: Vec<Var> = params.to_vec();
    vars.push(Var::L);
    let mut ech = Echelon::new();
    for g in gens {
        let lin = g.component(1);
        let row: Vec<Coeff> = vars.iter().map(|v| lin.coeff(&var_exps(*v))).collect();
        ech.insert(linalg::dense_to_sparse(&row));
    }
    let kernel = ech.kernel(vars.len());
    for v in kernel.iter().take(8) {
        if v[..params.len()].iter().all(Coeff::is_zero) {
            continue;
        }
        let s = Poly::var(Var::T);
        let mut images: [Poly; NVARS] = std::array::from_fn(|i| Poly::var(Var::from_idx(i)));
        for (var, c) in vars.iter().zip(v) {
            images[var.idx()] = s.scale(c);
        }
        if gens.iter().all(|g| g.compose(&images).is_zero()) {
            let dir: Vec<String> = v[..params.len()].iter().map(|c| c.to_string()).collect();
            return Some(format!("params = s·({}), λ = {}·s", dir.join(", "), v[params.len()]));
        }
    }
    None
}

/// Dimension of the local algebra of the lifted minor ideal, i.e. the
/// number of complex Weyl points born from the degeneracy at `λ₀`.
pub fn count_cwp(fam: &MatrixFamily, lambda0: &Coeff, cap: Option<u32>) -> Result<MultiplicityResult> {
    let mut warnings = Vec::new();
    if let Some(w) = check_lambda0(fam, lambda0, LAMBDA0_TOL) {
        warnings.push(w);
    }
    let ms = lifted_system(fam, lambda0)?;
    let vars = ms.vars();
    let homogeneous = ms.is_homogeneous();
    let cap = cap.unwrap_or_else(|| default_cap(fam, lambda0, homogeneous));
    let mut res = if homogeneous {
        graded_dimension(&ms.generators, &vars, cap)?
    } else {
        local_multiplicity(&ms.generators, &vars, cap)?
    };
    if res.verdict == Verdict::Inconclusive && lambda0.is_zero() {
        if let Some(w) = find_curve_witness(fam, &ms.generators) {
            res.verdict = Verdict::NotIsolated;
            res.witness = Some(w);
        }
    }
    res.warnings = warnings;
    Ok(res)
}

pub fn lifted_system(fam: &MatrixFamily, lambda0: &Coeff) -> Result<MinorSystem> {
    if fam.contains_var(Var::T) || fam.contains_var(Var::L) {
        return Err(Error::InvalidArgument(
            "count the unperturbed family: entries must not contain t or λ".into(),
        ));
    }
    minor_ideal(&lift(fam, lambda0), lambda0)
}

#[derive(Clone, Debug, Serialize)]
pub struct TwofoldAlgebra {
    pub result: MultiplicityResult,
    /// Coordinates of `[λ]` in the parameter basis.
    pub lambda_coords: Vec<String>,
    /// `(monomial, coordinates)` for every degree-2 parameter monomial.
    pub quadratic_coords: Vec<(String, Vec<String>)>,
    #[serde(skip)]
    pub lambda_exact: Vec<Coeff>,
    #[serde(skip)]
    pub quadratic_exact: Vec<(Exps, Vec<Coeff>)>,
}

/// Local algebra of a two-fold degeneracy with `λ` eliminated: the basis
/// uses parameter monomials only.
pub fn twofold_local_algebra(fam: &MatrixFamily, lambda0: &Coeff, cap: Option<u32>) -> Result<TwofoldAlgebra> {
    let k = cluster_size(fam, lambda0, 1e-6);
    if k != 2 {
        return Err(Error::InvalidArgument(format!(
            "λ₀ = {lambda0} has multiplicity {k} at the base point, expected 2"
        )));
    }
    let ms = lifted_system(fam, lambda0)?;
    let lam = {
        let mut e = [0; NVARS];
        e[Var::L.idx()] = 1;
        e
    };
    if !ms.generators.iter().any(|g| !g.coeff(&lam).is_zero() && g.order() == Some(1)) {
        return Err(Error::Unsupported(
            "no generator has a linear λ term; λ cannot be eliminated".into(),
        ));
    }
    let vars = ms.vars();
    let cap = cap.unwrap_or(DEFAULT_GENERAL_CAP);
    let (ds, hilbert) = dual_space(&ms.generators, &vars, cap);
    let ds = ds.ok_or_else(|| {
        Error::NoConvergence(format!("dual space still growing at order {cap}"))
    })?;
    let params = fam.params();
    let candidates = monomials_up_to(params, ds.order);
    let basis = ds.monomial_basis(&candidates);
    if basis.len() != ds.dim() {
        return Err(Error::Unsupported(
            "parameter monomials do not span the local algebra".into(),
        ));
    }
    let lambda_exact = ds
        .coordinates(&basis, &Poly::var(Var::L))
        .ok_or_else(|| Error::Unsupported("cannot express [λ] in the basis".into()))?;
    let mut quadratic_exact = Vec::new();
    for m in monomials_of_degree(params, 2) {
        let c = ds
            .coordinates(&basis, &Poly::monomial(m, Coeff::one()))
            .ok_or_else(|| Error::Unsupported("inconsistent coordinates".into()))?;
        quadratic_exact.push((m, c));
    }
    let fmt = |v: &[Coeff]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Ok(TwofoldAlgebra {
        result: MultiplicityResult {
            total: Some(ds.dim()),
            hilbert,
            basis,
            degree_cap_used: cap,
            verdict: Verdict::Isolated,
            witness: None,
            warnings: vec![],
        },
        lambda_coords: fmt(&lambda_exact),
        quadratic_coords: quadratic_exact
            .iter()
            .map(|(m, c)| (monomial_string(m), fmt(c)))
            .collect(),
        lambda_exact,
        quadratic_exact,
    })
}

/// The cubic `a31·a21·a33 − a31²·a23 + a21²·a32 − a21·a31·a22`, which
/// vanishes on 3×3 matrices with a two-dimensional eigenspace, evaluated on
/// the entries of a 3×3 family. Indices are 0-based.
pub fn sample_cubic(a: &dyn Fn(usize, usize) -> Poly) -> Poly {
    let (a21, a22, a23) = (a(1, 0), a(1, 1), a(1, 2));
    let (a31, a32, a33) = (a(2, 0), a(2, 1), a(2, 2));
    let t1 = &(&a31 * &a21) * &a33;
    let t2 = &(&a31 * &a31) * &a23;
    let t3 = &(&a21 * &a21) * &a32;
    let t4 = &(&a21 * &a31) * &a22;
    &(&(&t1 - &t2) + &t3) - &t4
}

/// Orbit of [`sample_cubic`] under simultaneous row/column permutations and
/// transposition, pulled back through a 3×3 family, duplicates removed.
pub fn sample_cubic_orbit(fam: &MatrixFamily) -> Result<Vec<Poly>> {
    if fam.n() != 3 {
        return Err(Error::InvalidArgument("the sample cubic needs a 3×3 family".into()));
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out: Vec<Poly> = Vec::new();
    for p in PERMS {
        for transpose in [false, true] {
            let e = sample_cubic(&|i, j| {
                let (r, c) = if transpose { (p[j], p[i]) } else { (p[i], p[j]) };
                fam.entry(r, c).clone()
            });
            if !e.is_zero() && !out.contains(&e) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// `dim O/(f*I)` with `I` generated by the sample cubic orbit, the route
/// that ignores the eigenvalue variable. For a linear family every generator
/// has order ≥ 3, so the dimension is at least `Σ_{d≤2} dim C[params]_d`.
pub fn sample_cubic_route(fam: &MatrixFamily, cap: u32) -> Result<MultiplicityResult> {
    let gens = sample_cubic_orbit(fam)?;
    let vars = fam.params();
    if gens.iter().all(Poly::is_homogeneous) {
        graded_dimension(&gens, vars, cap)
    } else {
        local_multiplicity(&gens, vars, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::matfam::{build_diagonal_linear, build_spin1_scaled, SymmetryClass};

    fn polys(s: &[&str]) -> Vec<Poly> {
        s.iter().map(|p| Poly::parse(p).unwrap()).collect()
    }

    #[test]
    fn spin1_count_and_basis() {
        let r = count_cwp(&build_spin1_scaled(), &Coeff::zero(), None).unwrap();
        assert_eq!(r.total, Some(6));
        assert_eq!(r.hilbert, vec![1, 4, 1]);
        assert_eq!(r.basis_strings(), ["1", "x", "y", "z", "l", "x^2"]);
        assert_eq!(r.verdict, Verdict::Isolated);
    }

    #[test]
    fn diagonal_count() {
        let f = build_diagonal_linear(&[rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(count_cwp(&f, &Coeff::zero(), None).unwrap().total, Some(3));
    }

    #[test]
    fn cusp_examples() {
        let v = [Var::X, Var::Y];
        let a = local_multiplicity(&polys(&["x^2 - y^3", "x + y"]), &v, 12).unwrap();
        assert_eq!(a.total, Some(2));
        let b = local_multiplicity(&polys(&["x^2 - y^3", "x"]), &v, 12).unwrap();
        assert_eq!(b.total, Some(3));
        assert_eq!(b.basis_strings(), ["1", "y", "y^2"]);
        let c = local_multiplicity(&polys(&["x^2"]), &[Var::X], 12).unwrap();
        assert_eq!(c.total, Some(2));
    }

    #[test]
    fn homogeneous_and_local_agree() {
        let ms = lifted_system(&build_spin1_scaled(), &Coeff::zero()).unwrap();
        let g = graded_dimension(&ms.generators, &ms.vars(), 4).unwrap();
        let l = local_multiplicity(&ms.generators, &ms.vars(), 6).unwrap();
        assert_eq!(g.total, l.total);
        assert_eq!(g.hilbert, l.hilbert);
    }

    #[test]
    fn non_isolated_is_not_certified() {
        let r = graded_dimension(&polys(&["x*y"]), &[Var::X, Var::Y], 5).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.total.is_none());
        let f = MatrixFamily::parse(SymmetryClass::Diagonal, &[vec!["x", "0"], vec!["0", "x"]]).unwrap();
        let r = count_cwp(&f, &Coeff::zero(), None).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsolated);
        assert!(r.witness.is_some());
    }

    #[test]
    fn dependent_linear_entries_give_a_line() {
        let f = MatrixFamily::parse(SymmetryClass::Hermitian, &[vec!["x + y", "z"], vec!["z", "-x - y"]]).unwrap();
        let r = count_cwp(&f, &Coeff::zero(), None).unwrap();
        assert_eq!(r.verdict, Verdict::NotIsolated);
        assert!(r.witness.unwrap().starts_with("params = s·"));
    }

    #[test]
    fn twofold_symmetric_example() {
        let f = MatrixFamily::parse(
            SymmetryClass::Symmetric,
            &[vec!["2", "x", "y"], vec!["x", "0", "0"], vec!["y", "0", "0"]],
        )
        .unwrap();
        let a = twofold_local_algebra(&f, &Coeff::zero(), None).unwrap();
        assert_eq!(a.result.total, Some(4));
        assert_eq!(a.result.basis_strings(), ["1", "x", "y", "x^2"]);
        let m2 = |c: &[Coeff]| c.iter().map(|v| v.scale_int(-2)).collect::<Vec<_>>();
        let x2 = &a.quadratic_exact.iter().find(|(m, _)| *m == [2, 0, 0, 0, 0]).unwrap().1;
        let y2 = &a.quadratic_exact.iter().find(|(m, _)| *m == [0, 2, 0, 0, 0]).unwrap().1;
        assert_eq!(x2, y2);
        assert_eq!(x2, &m2(&a.lambda_exact));
    }
}

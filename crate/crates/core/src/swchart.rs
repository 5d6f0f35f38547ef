//! Schrieffer–Wolff block decomposition near a strictly `k`-fold eigenvalue
//! and the effective `k×k` family of a matrix family.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::matfam::{MatrixFamily, NumericFamily, SymmetryClass};
use crate::numeric::{c, eigh, eigvals, expm, inverse, is_hermitian, kernel_and_complement, max_abs, solve_sylvester, CMat};
use crate::poly::{monomials_up_to, Exps, Poly, Var};

pub const CLUSTER_TOL: f64 = 1e-8;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const FD_STEP: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct SWDecomposition {
    pub k: usize,
    pub lambda0: Complex64,
    pub g0: CMat,
    /// `A₀′ = G₀⁻¹ A₀ G₀ = λ₀·1_k ⊕ D`.
    pub a0_prime: CMat,
    pub s: CMat,
    pub c: CMat,
    pub aeff: CMat,
    pub residual: f64,
    pub iterations: usize,
}

impl SWDecomposition {
    /// Upper-left `k×k` block of `aeff`.
    pub fn aeff_block(&self) -> CMat {
        self.aeff.view((0, 0), (self.k, self.k)).into_owned()
    }

    /// Rebuilds `G₀·e^S·(A₀′ + C + A_eff)·e^{−S}·G₀⁻¹`.
    pub fn reconstruct(&self) -> CMat {
        let g0inv = inverse(&self.g0).expect("invertible G0");
        &self.g0 * expm(&self.s) * (&self.a0_prime + &self.c + &self.aeff) * expm(&(-&self.s)) * g0inv
    }
}

fn rows_of(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl Serialize for SWDecomposition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SWDecomposition", 8)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("lambda0", &[self.lambda0.re, self.lambda0.im])?;
        st.serialize_field("G0", &rows_of(&self.g0))?;
        st.serialize_field("S", &rows_of(&self.s))?;
        st.serialize_field("C", &rows_of(&self.c))?;
        st.serialize_field("Aeff", &rows_of(&self.aeff))?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("iterations", &self.iterations)?;
        st.end()
    }
}

/// Gram–Schmidt of the projections of the standard basis onto the column
/// span of `v`; gives a reproducible basis for degenerate subspaces.
fn canonical_basis(v: &CMat) -> CMat {
    let n = v.nrows();
    let k = v.ncols();
    let p = v * v.adjoint();
    let mut cols: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for i in 0..n {
        if cols.len() == k {
            break;
        }
        let mut w = p.column(i).into_owned();
        for q in &cols {
            let proj = q.dotc(&w);
            w -= q * proj;
        }
        let nrm = w.norm();
        if nrm > 1e-6 {
            cols.push(w / c(nrm, 0.0));
        }
    }
    CMat::from_columns(&cols)
}

/// `G₀` with the `λ₀` cluster first, and the cluster size `k`.
pub fn cluster_frame(a0: &CMat, lambda0: Complex64) -> Result<(CMat, usize)> {
    let n = a0.nrows();
    let scale = max_abs(a0).max(1.0);
    let shifted = a0 - CMat::identity(n, n) * lambda0;
    if is_hermitian(a0, 1e-12 * scale) && lambda0.im.abs() <= CLUSTER_TOL {
        let (vals, vecs) = eigh(a0);
        let (mut inside, mut outside) = (Vec::new(), Vec::new());
        for (i, v) in vals.iter().enumerate() {
            if (v - lambda0.re).abs() <= CLUSTER_TOL * scale {
                inside.push(vecs.column(i).into_owned());
            } else {
                outside.push(vecs.column(i).into_owned());
            }
        }
        let k = inside.len();
        if k == 0 {
            return Err(Error::InvalidArgument(format!("{lambda0} is not an eigenvalue")));
        }
        let mut cols: Vec<_> = canonical_basis(&CMat::from_columns(&inside)).column_iter().map(|c| c.into_owned()).collect();
        if !outside.is_empty() {
            cols.extend(canonical_basis(&CMat::from_columns(&outside)).column_iter().map(|c| c.into_owned()));
        }
        return Ok((CMat::from_columns(&cols), k));
    }
    let alg = eigvals(a0).iter().filter(|e| (*e - lambda0).norm() <= CLUSTER_TOL * scale).count();
    if alg == 0 {
        return Err(Error::InvalidArgument(format!("{lambda0} is not an eigenvalue")));
    }
    let tol = CLUSTER_TOL * scale;
    let (ker, _) = kernel_and_complement(&shifted, tol);
    if ker.ncols() != alg {
        return Err(Error::NotStrict(format!(
            "eigenvalue {lambda0} has algebraic multiplicity {alg} but geometric multiplicity {}",
            ker.ncols()
        )));
    }
    // range of A0 − λ0 is the complementary invariant subspace
    let (_, range) = kernel_and_complement(&shifted.adjoint(), tol);
    let mut cols: Vec<_> = canonical_basis(&ker).column_iter().map(|c| c.into_owned()).collect();
    cols.extend(range.column_iter().map(|c| c.into_owned()));
    Ok((CMat::from_columns(&cols), alg))
}

fn block(m: &CMat, r: (usize, usize), s: (usize, usize)) -> CMat {
    m.view(r, s).into_owned()
}

fn off_diag_norm(m: &CMat, k: usize) -> f64 {
    let n = m.nrows();
    max_abs(&block(m, (0, k), (k, n - k))).max(max_abs(&block(m, (k, 0), (n - k, k))))
}

/// Finds `(S, C, A_eff)` with `A = G₀·e^S·(A₀′ + C + A_eff)·e^{−S}·G₀⁻¹`.
pub fn sw_decompose(a0: &CMat, lambda0: Complex64, a: &CMat, tol: f64) -> Result<SWDecomposition> {
    let n = a0.nrows();
    if !a0.is_square() || a.shape() != a0.shape() {
        return Err(Error::InvalidArgument("A0 and A must be square of equal size".into()));
    }
    let (g0, k) = cluster_frame(a0, lambda0)?;
    let g0inv = inverse(&g0).ok_or_else(|| Error::NotStrict("singular frame".into()))?;
    let hermitian = is_hermitian(a0, 1e-12) && is_hermitian(a, 1e-12) && lambda0.im == 0.0;
    let mut a0p = &g0inv * a0 * &g0;
    // exact block form
    for i in 0..n {
        for j in 0..n {
            if (i < k) != (j < k) || (i < k && i != j) {
                a0p[(i, j)] = c(0.0, 0.0);
            }
        }
    }
    for i in 0..k {
        a0p[(i, i)] = lambda0;
    }
    let b = &g0inv * a * &g0;
    let m_of = |s: &CMat| expm(&(-s)) * &b * expm(s);
    let mut s = CMat::zeros(n, n);
    let mut m = b.clone();
    let mut err = off_diag_norm(&m, k);
    let mut iterations = 0;
    let mut stalled = false;
    while err > tol * 1e-3 && k < n && !stalled {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::NoConvergence(format!("off-diagonal blocks stuck at {err:.2e}")));
        }
        let m11 = block(&m, (0, 0), (k, k));
        let m22 = block(&m, (k, k), (n - k, n - k));
        let d12 = solve_sylvester(&m11, &m22, &(-block(&m, (0, k), (k, n - k))))
            .ok_or_else(|| Error::NoConvergence("singular Sylvester equation".into()))?;
        let d21 = solve_sylvester(&m22, &m11, &(-block(&m, (k, 0), (n - k, k))))
            .ok_or_else(|| Error::NoConvergence("singular Sylvester equation".into()))?;
        let mut delta = CMat::zeros(n, n);
        delta.view_mut((0, k), (k, n - k)).copy_from(&d12);
        delta.view_mut((k, 0), (n - k, k)).copy_from(&d21);
        if hermitian {
            delta = (&delta - delta.adjoint()).scale(0.5);
        }
        let mut step = 1.0;
        loop {
            let cand = &s + delta.scale(step);
            let mc = m_of(&cand);
            let e = off_diag_norm(&mc, k);
            if e < err || step < 1e-4 {
                if e >= err {
                    if err <= tol * 0.1 {
                        stalled = true;
                        break;
                    }
                    return Err(Error::NoConvergence(format!("step halving failed at {err:.2e}")));
                }
                s = cand;
                m = mc;
                err = e;
                break;
            }
            step *= 0.5;
        }
    }
    let mut aeff = CMat::zeros(n, n);
    let mut cm = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i < k && j < k {
                aeff[(i, j)] = m[(i, j)] - a0p[(i, j)];
            } else if i >= k && j >= k {
                cm[(i, j)] = m[(i, j)] - a0p[(i, j)];
            }
        }
    }
    if hermitian {
        aeff = (&aeff + aeff.adjoint()).scale(0.5);
        cm = (&cm + cm.adjoint()).scale(0.5);
    }
    let mut out = SWDecomposition {
        k,
        lambda0,
        g0,
        a0_prime: a0p,
        s,
        c: cm,
        aeff,
        residual: 0.0,
        iterations,
    };
    out.residual = max_abs(&(out.reconstruct() - a));
    if out.residual > tol.max(1e-14 * max_abs(a)) {
        return Err(Error::NoConvergence(format!("reconstruction residual {:.2e}", out.residual)));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EffectiveFamily {
    pub k: usize,
    pub order: u32,
    /// `Ã_eff` with its trace.
    pub aeff: MatrixFamily,
    /// `tr(Ã_eff)/k`.
    pub trace_part: Poly,
    /// Traceless part in the Pauli (`k = 2`) or Gell-Mann basis.
    pub h: Vec<Poly>,
    pub basis: String,
    pub warnings: Vec<String>,
}

/// Pauli matrices for `k = 2`, generalized Gell-Mann matrices otherwise;
/// all normalized to `tr(λ_a λ_b) = 2δ_ab`.
pub fn traceless_basis(k: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    let zero = CMat::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let mut sx = zero.clone();
            sx[(i, j)] = c(1.0, 0.0);
            sx[(j, i)] = c(1.0, 0.0);
            let mut sy = zero.clone();
            sy[(i, j)] = c(0.0, -1.0);
            sy[(j, i)] = c(0.0, 1.0);
            out.push(sx);
            out.push(sy);
        }
    }
    for l in 1..k {
        let f = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut d = zero.clone();
        for i in 0..l {
            d[(i, i)] = c(f, 0.0);
        }
        d[(l, l)] = c(-f * l as f64, 0.0);
        out.push(d);
    }
    out
}

fn rationalize(z: Complex64, warnings: &mut Vec<String>) -> Coeff {
    let snap = |v: f64| if v.abs() < 1e-9 { 0.0 } else { v };
    let z = c(snap(z.re), snap(z.im));
    if let Some(q) = Coeff::approximate(z, 10_000, 1e-6) {
        return q;
    }
    if let Some(q) = Coeff::approximate(z, 1_000_000_000, 1e-9) {
        warnings.push(format!("coefficient {z} kept to 1e-9 precision"));
        return q;
    }
    warnings.push(format!("coefficient {z} kept as a binary float"));
    Coeff::from_f64(z.re, z.im).unwrap_or_else(Coeff::zero)
}

fn aeff_at(a0: &CMat, lambda0: Complex64, fam: &NumericFamily, p: &[f64]) -> Result<CMat> {
    Ok(sw_decompose(a0, lambda0, &fam.at(p), DEFAULT_TOL)?.aeff_block())
}

/// Richardson-extrapolated central second differences of `A_eff`.
fn second_derivative(a0: &CMat, lambda0: Complex64, fam: &NumericFamily, a: usize, b: usize) -> Result<CMat> {
    let m = fam.arity();
    let at = |sa: f64, sb: f64, h: f64| -> Result<CMat> {
        let mut p = vec![0.0; m];
        p[a] += sa * h;
        p[b] += sb * h;
        aeff_at(a0, lambda0, fam, &p)
    };
    let d = |h: f64| -> Result<CMat> {
        if a == b {
            let f0 = aeff_at(a0, lambda0, fam, &vec![0.0; m])?;
            Ok((at(1.0, 0.0, h)? - f0.scale(2.0) + at(-1.0, 0.0, h)?).scale(1.0 / (h * h)))
        } else {
            Ok((at(1.0, 1.0, h)? - at(1.0, -1.0, h)? - at(-1.0, 1.0, h)? + at(-1.0, -1.0, h)?).scale(1.0 / (4.0 * h * h)))
        }
    };
    let coarse = d(FD_STEP)?;
    let fine = d(FD_STEP / 2.0)?;
    Ok(&fine + (&fine - &coarse).scale(1.0 / 3.0))
}

/// Taylor expansion of the effective block of `fam` around the origin to
/// `order` (1 or 2), rationalized, with its traceless part separated.
pub fn effective_family(fam: &MatrixFamily, lambda0: &Coeff, order: u32) -> Result<EffectiveFamily> {
    if !(1..=2).contains(&order) {
        return Err(Error::Unsupported(format!("order {order}: only orders 1 and 2 are fitted")));
    }
    if fam.contains_var(Var::T) || fam.contains_var(Var::L) {
        return Err(Error::InvalidArgument("family must depend on the parameters only".into()));
    }
    let num = fam.numeric(0.0);
    let m = fam.arity();
    let l0 = lambda0.to_complex();
    let a0 = num.at(&vec![0.0; m]);
    let (g0, k) = cluster_frame(&a0, l0)?;
    let g0inv = inverse(&g0).ok_or_else(|| Error::NotStrict("singular frame".into()))?;
    let hermitian = fam.class() != SymmetryClass::General && l0.im == 0.0;
    // Taylor coefficients keyed by exponent vector
    let mut coeffs: Vec<(Exps, CMat)> = Vec::new();
    for a in 0..m {
        let d = &g0inv * num.derivative(a).at(&vec![0.0; m]) * &g0;
        let mut e = [0; 5];
        e[a] = 1;
        coeffs.push((e, block(&d, (0, 0), (k, k))));
    }
    if order >= 2 {
        for a in 0..m {
            for b in a..m {
                let d2 = second_derivative(&a0, l0, &num, a, b)?;
                let mut e = [0; 5];
                e[a] += 1;
                e[b] += 1;
                let factor = if a == b { 0.5 } else { 1.0 };
                coeffs.push((e, d2.scale(factor)));
            }
        }
    }
    let mut warnings = Vec::new();
    let mut entries = vec![Poly::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            if hermitian && j < i {
                continue;
            }
            let mut p = Poly::zero();
            for (e, mat) in &coeffs {
                let mut z = mat[(i, j)];
                if hermitian && i == j {
                    z.im = 0.0;
                }
                p.add_term(*e, rationalize(z, &mut warnings));
            }
            if hermitian {
                entries[j * k + i] = p.conj();
            }
            entries[i * k + j] = p;
        }
    }
    let class = match fam.class() {
        _ if !hermitian => SymmetryClass::General,
        SymmetryClass::Hermitian => SymmetryClass::Hermitian,
        _ => SymmetryClass::Symmetric,
    };
    let rows: Vec<Vec<Poly>> = entries.chunks(k).map(|r| r.to_vec()).collect();
    let aeff = MatrixFamily::new(class, rows)?;
    let mut trace = Poly::zero();
    for i in 0..k {
        trace = &trace + &entries[i * k + i];
    }
    let trace_part = trace.scale(&Coeff::from_ratio(1, k as i64));
    let h = traceless_components(&entries, k, &mut warnings);
    Ok(EffectiveFamily {
        k,
        order,
        aeff,
        trace_part,
        h,
        basis: if k == 2 { "pauli".into() } else { "gell-mann".into() },
        warnings,
    })
}

/// Components `tr(A·λ_a)/2` of a `k×k` polynomial matrix.
fn traceless_components(entries: &[Poly], k: usize, warnings: &mut Vec<String>) -> Vec<Poly> {
    let basis = traceless_basis(k);
    let mut monos: Vec<Exps> = Vec::new();
    for p in entries {
        for (e, _) in p.terms() {
            if !monos.contains(e) {
                monos.push(*e);
            }
        }
    }
    basis
        .iter()
        .map(|lam| {
            let mut out = Poly::zero();
            for e in &monos {
                let mut z = c(0.0, 0.0);
                for i in 0..k {
                    for j in 0..k {
                        z += entries[i * k + j].coeff(e).to_complex() * lam[(j, i)];
                    }
                }
                out.add_term(*e, rationalize(z * 0.5, warnings));
            }
            out
        })
        .collect()
}

/// Monomials used by an effective fit of the given order.
pub fn fit_monomials(arity: usize, order: u32) -> Vec<Exps> {
    monomials_up_to(&Var::PARAMS[..arity], order)
        .into_iter()
        .filter(|e| e.iter().sum::<u32>() > 0)
        .collect()
}

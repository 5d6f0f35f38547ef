//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Eigenvalues ascending with matching eigenvector columns. The input is
/// symmetrized first so tiny non-hermitian noise is ignored.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000).unwrap_or_else(|| {
        let q = fixed_unitary(h.nrows());
        let mut e = nalgebra::SymmetricEigen::try_new(q.adjoint() * &h * &q, f64::EPSILON, 10_000)
            .expect("eigensolver failed to converge");
        e.eigenvectors = &q * e.eigenvectors;
        e
    });
    let n = eig.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, col| eig.eigenvectors[(r, idx[col])]);
    (vals, vecs)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// Eigenvalues of a general complex matrix, sorted by real then imaginary
/// part.
pub fn eigvals(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut v: Vec<Complex64> = if is_hermitian(m, 1e-14 * scale.max(1.0)) {
        eigh(&((m + m.adjoint()) * Complex64::new(0.5, 0.0))).0.into_iter().map(|e| Complex64::new(e, 0.0)).collect()
    } else {
        schur_diagonal(m).unwrap_or_else(|| {
            // rotate away from the stalled configuration
            let q = fixed_unitary(n);
            schur_diagonal(&(&q * m * q.adjoint())).expect("Schur iteration failed to converge")
        })
    };
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn schur_diagonal(m: &CMat) -> Option<Vec<Complex64>> {
    let t = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)?.unpack().1;
    Some((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn fixed_unitary(n: usize) -> CMat {
    let a = CMat::from_fn(n, n, |i, j| Complex64::new(((i * 7 + j * 3 + 1) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64 - 2.0));
    a.qr().q()
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let svd = nalgebra::SVD::try_new(m.clone(), false, false, f64::EPSILON, 10_000)
        .or_else(|| nalgebra::SVD::try_new(fixed_unitary(m.nrows()) * m, false, false, f64::EPSILON, 10_000))
        .expect("SVD failed to converge");
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `tol`.
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis (columns) of the numerical kernel and of its
/// orthogonal complement (the row space of `m`, conjugated).
pub fn kernel_and_complement(m: &CMat, tol: f64) -> (CMat, CMat) {
    let n = m.ncols();
    // eigenvectors of m†m ascending: small eigenvalues span the kernel
    let (vals, vecs) = eigh(&(m.adjoint() * m));
    let k = vals.iter().filter(|&&v| v.max(0.0).sqrt() <= tol).count();
    let ker = vecs.columns(0, k).into_owned();
    let rest = vecs.columns(k, n - k).into_owned();
    (ker, rest)
}

pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Solves `A X − X B = C` through the Kronecker form.
pub fn solve_sylvester(a: &CMat, b: &CMat, cm: &CMat) -> Option<CMat> {
    let (p, q) = (a.nrows(), b.nrows());
    if p == 0 || q == 0 {
        return Some(CMat::zeros(p, q));
    }
    let n = p * q;
    // vec is column-major: index i + p*j
    let mut k = CMat::zeros(n, n);
    for j in 0..q {
        for i in 0..p {
            let row = i + p * j;
            for l in 0..p {
                k[(row, l + p * j)] += a[(i, l)];
            }
            for l in 0..q {
                k[(row, i + p * l)] -= b[(l, j)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_iterator(n, cm.iter().copied());
    let sol = k.lu().solve(&rhs)?;
    Some(CMat::from_iterator(p, q, sol.iter().copied()))
}

/// Uniform random hermitian matrix with entries of modulus `≤ scale`.
pub fn random_hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(rng.random_range(-scale..scale), 0.0);
        for j in i + 1..n {
            let z = c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
                .scale(std::f64::consts::FRAC_1_SQRT_2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Radical-inverse (Halton) coordinate of `index` in base `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

pub const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn eigvals_on_structured_matrices() {
        let r = std::f64::consts::SQRT_2;
        // spin-1 family at (1, 0, 0)
        let m = CMat::from_row_slice(3, 3, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let ev = eigvals(&m);
        for (e, want) in ev.iter().zip([-r, 0.0, r]) {
            assert!((e - c(want, 0.0)).norm() < 1e-12);
        }
        let j = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(eigvals(&j).iter().all(|e| e.norm() < 1e-12));
    }

    #[test]
    fn eigh_sorted_and_orthonormal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let m = random_hermitian(4, 1.0, &mut rng);
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let d = nalgebra::DVector::from_iterator(4, vals.iter().map(|&v| c(v, 0.0)));
        let recon = &vecs * CMat::from_diagonal(&d) * vecs.adjoint();
        assert!(max_abs(&(recon - &m)) < 1e-12);
    }

    #[test]
    fn sylvester_solution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let a = random_hermitian(2, 1.0, &mut rng) + CMat::identity(2, 2).scale(5.0);
        let b = random_hermitian(3, 1.0, &mut rng);
        let cm = CMat::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let x = solve_sylvester(&a, &b, &cm).unwrap();
        assert!(max_abs(&(&a * &x - &x * &b - cm)) < 1e-12);
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }
}

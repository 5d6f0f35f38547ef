#![allow(dead_code)]

use num_rational::BigRational;
use rand::Rng;
use weylbound::field::{rat, GaussianRational};
use weylbound::matfam::{build_diagonal_linear, build_linear3, build_symmetric_linear, MatrixFamily};
use weylbound::{Coeff, SymmetryClass};

pub fn small_rat<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.random_range(-6..=6), rng.random_range(1..=4))
}

pub fn gauss<R: Rng>(rng: &mut R, real: bool) -> Coeff {
    let im = if real { rat(0, 1) } else { small_rat(rng) };
    Coeff::from_gaussian(GaussianRational::new(small_rat(rng), im))
}

pub fn random_hermitian_exact<R: Rng>(k: usize, rng: &mut R, real: bool) -> Vec<Vec<Coeff>> {
    let mut m = vec![vec![Coeff::zero(); k]; k];
    for i in 0..k {
        m[i][i] = Coeff::from_rational(small_rat(rng));
        for j in i + 1..k {
            let z = gauss(rng, real);
            m[j][i] = z.conj();
            m[i][j] = z;
        }
    }
    m
}

pub fn random_general_exact<R: Rng>(k: usize, rng: &mut R) -> Vec<Vec<Coeff>> {
    (0..k).map(|_| (0..k).map(|_| gauss(rng, false)).collect()).collect()
}

/// Random linear family of the class, exact rational coefficients.
pub fn random_linear_family<R: Rng>(k: usize, class: SymmetryClass, rng: &mut R) -> MatrixFamily {
    match class {
        SymmetryClass::Hermitian => {
            let mats = [0, 1, 2].map(|_| random_hermitian_exact(k, rng, false));
            build_linear3(class, &mats).unwrap()
        }
        SymmetryClass::General => {
            let mats = [0, 1, 2].map(|_| random_general_exact(k, rng));
            build_linear3(class, &mats).unwrap()
        }
        SymmetryClass::Symmetric => {
            let sym = |rng: &mut R| {
                let mut m = vec![vec![rat(0, 1); k]; k];
                for i in 0..k {
                    for j in i..k {
                        let v = small_rat(rng);
                        m[i][j] = v.clone();
                        m[j][i] = v;
                    }
                }
                m
            };
            let (a, b) = (sym(rng), sym(rng));
            build_symmetric_linear(&a, &b).unwrap()
        }
        SymmetryClass::Diagonal => loop {
            let slopes: Vec<BigRational> = (0..k).map(|_| small_rat(rng)).collect();
            if let Ok(f) = build_diagonal_linear(&slopes) {
                return f;
            }
        },
    }
}

/// Random real invertible integer matrix of size `m`.
pub fn random_change<R: Rng>(m: usize, rng: &mut R) -> Vec<Vec<Coeff>> {
    loop {
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.random_range(-3..=3)).collect()).collect();
        let det = match m {
            1 => a[0][0],
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
        };
        if det != 0 {
            return a.iter().map(|r| r.iter().map(|&v| Coeff::from_int(v)).collect()).collect();
        }
    }
}

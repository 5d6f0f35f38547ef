//! Numerical location of real and complex Weyl points and their charges.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::chern::{chern_on_sphere, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::field::{approx_rational, Coeff};
use crate::localdim::{count_cwp, Verdict};
use crate::matfam::{MatrixFamily, NumericFamily, SymmetryClass};
use crate::minors::{lift, minor_ideal, realify};
use crate::numeric::{eigh, eigvals, halton, singular_values, CMat, PRIMES};
use crate::poly::{NumPoly, Poly, Var, NVARS};

#[derive(Clone, Debug, PartialEq)]
pub struct WeylPoint {
    pub location: Vec<Complex64>,
    pub lambda: Complex64,
    /// Lower band index `j` of the crossing pair `(j, j+1)`; real points only.
    pub band_pair: Option<usize>,
    pub charge: Option<i32>,
    pub residual: f64,
}

impl WeylPoint {
    pub fn is_real(&self) -> bool {
        self.location.iter().all(|z| z.im == 0.0) && self.lambda.im == 0.0
    }

    pub fn real_location(&self) -> Vec<f64> {
        self.location.iter().map(|z| z.re).collect()
    }

    fn coords(&self) -> Vec<Complex64> {
        let mut v = self.location.clone();
        v.push(self.lambda);
        v
    }

    fn distance(&self, other: &WeylPoint) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Serialize for WeylPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |z: &Complex64| [z.re, z.im];
        let mut st = s.serialize_struct("WeylPoint", 5)?;
        st.serialize_field("location", &self.location.iter().map(pair).collect::<Vec<_>>())?;
        st.serialize_field("lambda", &pair(&self.lambda))?;
        st.serialize_field("band_pair", &self.band_pair)?;
        st.serialize_field("charge", &self.charge)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylOptions {
    /// Number of seeds; default `200 ·` expected count.
    pub seeds: Option<usize>,
    pub seed: u64,
    pub residual_tol: f64,
    pub gap_tol: f64,
    /// Merge radius relative to the box size.
    pub merge_rel: f64,
    pub max_iter: usize,
    /// Expected number of complex points; computed from the unperturbed
    /// family when absent.
    pub expected: Option<usize>,
    pub charges: bool,
    pub grid: usize,
}

impl Default for WeylOptions {
    fn default() -> Self {
        Self {
            seeds: None,
            seed: 0,
            residual_tol: 1e-10,
            gap_tol: 1e-8,
            merge_rel: 1e-6,
            max_iter: 100,
            expected: None,
            charges: true,
            grid: DEFAULT_GRID,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylSearch {
    pub points: Vec<WeylPoint>,
    pub seeds_used: usize,
    pub unconverged_seeds: usize,
    pub expected: Option<usize>,
    pub complete: bool,
    pub note: Option<String>,
}

impl WeylSearch {
    pub fn real_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_real()).count()
    }
}

/// `λ_{j+1} − λ_j` at a real point, eigenvalues ascending.
pub fn eigengap(fam: &NumericFamily, point: &[f64], j: usize) -> Result<f64> {
    if j + 1 >= fam.n() {
        return Err(Error::InvalidArgument(format!("band pair {j} out of range")));
    }
    let ev = eigh(&fam.at(point)).0;
    Ok(ev[j + 1] - ev[j])
}

/// Exact rational stand-in for a floating `t`.
pub fn exact_t(t: f64) -> Coeff {
    approx_rational(t, 1_000_000, 1e-15 * t.abs().max(1.0))
        .map(Coeff::from_rational)
        .or_else(|| Coeff::from_f64(t, 0.0))
        .unwrap_or_else(Coeff::zero)
}

/// Lifted minors with `t` fixed, compiled for numeric evaluation along
/// with their partial derivatives in `(params…, λ)`.
struct MinorEval {
    arity: usize,
    polys: Vec<NumPoly>,
    grads: Vec<Vec<NumPoly>>,
}

impl MinorEval {
    fn new(gens: &[Poly], arity: usize) -> Self {
        let mut vars: Vec<Var> = Var::PARAMS[..arity].to_vec();
        vars.push(Var::L);
        let polys = gens.iter().map(Poly::to_num).collect();
        let grads = gens
            .iter()
            .map(|g| vars.iter().map(|v| g.derivative(*v).to_num()).collect())
            .collect();
        Self { arity, polys, grads }
    }

    fn full(&self, u: &[Complex64]) -> [Complex64; NVARS] {
        let mut f = [Complex64::new(0.0, 0.0); NVARS];
        f[..self.arity].copy_from_slice(&u[..self.arity]);
        f[Var::L.idx()] = u[self.arity];
        f
    }

    fn values(&self, u: &[Complex64]) -> Vec<Complex64> {
        let f = self.full(u);
        self.polys.iter().map(|p| p.eval(&f)).collect()
    }

    fn jacobian(&self, u: &[Complex64]) -> DMatrix<Complex64> {
        let f = self.full(u);
        let m = self.arity + 1;
        DMatrix::from_fn(self.polys.len(), m, |i, k| self.grads[i][k].eval(&f))
    }

    fn residual(&self, u: &[Complex64]) -> f64 {
        self.values(u).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn lifted_at_t(fam: &MatrixFamily, t: f64) -> Result<(MatrixFamily, Vec<Poly>, Vec<Poly>)> {
    let ft = fam.at_t(&exact_t(t));
    let ms = minor_ideal(&lift(&ft, &Coeff::zero()), &Coeff::zero())?;
    let real = realify(&ms)?.realified.unwrap_or_default();
    Ok((ft, ms.generators, real))
}

/// Sum of `count_cwp` over the multiple eigenvalues of the unperturbed
/// family at the base point. `None` when some count is not certified.
pub fn expected_cwp(fam: &MatrixFamily) -> Option<usize> {
    let base = fam.at_t(&Coeff::zero());
    let m = base.evaluate_full(&[Complex64::new(0.0, 0.0); NVARS]);
    let ev = eigvals(&m);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for e in ev {
        match clusters.iter_mut().find(|(c, _)| (*c - e).norm() < 1e-8) {
            Some(c) => c.1 += 1,
            None => clusters.push((e, 1)),
        }
    }
    let mut total = 0;
    for (c, mult) in clusters {
        if mult < 2 {
            continue;
        }
        let l0 = Coeff::approximate(c, 1_000_000, 1e-9)?;
        let r = count_cwp(&base, &l0, None).ok()?;
        if r.verdict != Verdict::Isolated {
            return None;
        }
        total += r.total?;
    }
    Some(total)
}

/// Lower index of the pair of closest eigenvalues around `lambda`, ties
/// toward the lower index.
fn band_pair_of(vals: &[f64], lambda: f64) -> usize {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for j in 0..vals.len() - 1 {
        let score = (vals[j + 1] - vals[j]) + (vals[j] - lambda).abs() + (vals[j + 1] - lambda).abs();
        if score < best_score - 1e-14 {
            best = j;
            best_score = score;
        }
    }
    best
}

/// A few Newton-like steps shrinking the gap of pair `j`.
fn gap_descent(fam: &NumericFamily, dfam: &[NumericFamily], p: &mut Vec<f64>, j: usize, bound: f64) {
    for _ in 0..8 {
        let (vals, vecs) = eigh(&fam.at(p));
        let g = vals[j + 1] - vals[j];
        if g < 1e-12 {
            return;
        }
        let grad: Vec<f64> = dfam
            .iter()
            .map(|d| {
                let dh = d.at(p);
                let lo = vecs.column(j);
                let hi = vecs.column(j + 1);
                (hi.dotc(&(&dh * hi)) - lo.dotc(&(&dh * lo))).re
            })
            .collect();
        let n2: f64 = grad.iter().map(|v| v * v).sum();
        if n2 < 1e-24 {
            return;
        }
        let mut step = 1.0;
        loop {
            let q: Vec<f64> = p.iter().zip(&grad).map(|(a, b)| a - step * g * b / n2).collect();
            if q.iter().all(|v| v.abs() <= bound) {
                let ev = eigh(&fam.at(&q)).0;
                if ev[j + 1] - ev[j] < g {
                    *p = q;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-3 {
                return;
            }
        }
    }
}

/// Levenberg–Marquardt on the real minor system in `(params, λ)`.
fn refine_real(eval: &MinorEval, u0: &[f64], max_iter: usize, tol: f64) -> Option<Vec<f64>> {
    let m = u0.len();
    let to_c = |u: &[f64]| u.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
    let mut u = u0.to_vec();
    let mut mu = 1e-3;
    let cost = |u: &[f64]| -> f64 { eval.values(&to_c(u)).iter().map(|z| z.re * z.re).sum() };
    let mut c = cost(&u);
    for _ in 0..max_iter {
        let uc = to_c(&u);
        let f = DVector::from_iterator(eval.polys.len(), eval.values(&uc).iter().map(|z| z.re));
        if f.amax() <= tol * 1e-2 {
            return Some(u);
        }
        let jac = eval.jacobian(&uc).map(|z| z.re);
        let jtj = jac.transpose() * &jac;
        let jtf = jac.transpose() * &f;
        let mut accepted = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..m {
                a[(i, i)] += mu * (1.0 + jtj[(i, i)]);
            }
            let Some(delta) = a.lu().solve(&(-&jtf)) else {
                mu *= 10.0;
                continue;
            };
            let cand: Vec<f64> = u.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let cc = cost(&cand);
            if cc < c {
                let small = delta.amax() <= 1e-15 * (1.0 + u.iter().fold(0.0f64, |a, b| a.max(b.abs())));
                u = cand;
                c = cc;
                mu = (mu * 0.3).max(1e-15);
                accepted = true;
                if small {
                    return Some(u);
                }
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    (eval.residual(&to_c(&u)) <= tol).then_some(u)
}

fn merge(points: &mut Vec<WeylPoint>, p: WeylPoint, radius: f64) -> bool {
    if let Some(q) = points.iter_mut().find(|q| q.distance(&p) <= radius) {
        if p.residual < q.residual {
            *q = p;
        }
        false
    } else {
        points.push(p);
        true
    }
}

fn sort_points(points: &mut [WeylPoint]) {
    points.sort_by(|a, b| {
        let ka: Vec<f64> = a.coords().iter().flat_map(|z| [z.re, z.im]).collect();
        let kb: Vec<f64> = b.coords().iter().flat_map(|z| [z.re, z.im]).collect();
        ka.iter()
            .zip(&kb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

fn check_hermitian_like(fam: &MatrixFamily) -> Result<()> {
    match fam.class() {
        SymmetryClass::General => Err(Error::ClassViolation(
            "real Weyl points need a hermitian, symmetric or diagonal family".into(),
        )),
        _ => Ok(()),
    }
}

/// Real degeneracy points of the family at fixed `t` inside `[−box, box]^m`.
pub fn find_real_weyl_points(fam: &MatrixFamily, t: f64, bx: f64, opts: &WeylOptions) -> Result<WeylSearch> {
    check_hermitian_like(fam)?;
    let (_, _, real) = lifted_at_t(fam, t)?;
    let eval = MinorEval::new(&real, fam.arity());
    let (complex_eval, _) = {
        let (_, gens, _) = lifted_at_t(fam, t)?;
        (MinorEval::new(&gens, fam.arity()), ())
    };
    let num = fam.numeric(t);
    let dnum: Vec<NumericFamily> = (0..fam.arity()).map(|k| num.derivative(k)).collect();
    let expected = opts.expected.or_else(|| expected_cwp(fam));
    let n_seeds = opts.seeds.unwrap_or(200 * expected.unwrap_or(6).max(1));
    let m = fam.arity();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let shift: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let radius = opts.merge_rel * bx;
    let mut points: Vec<WeylPoint> = Vec::new();
    let mut unconverged = 0;
    for s in 0..n_seeds {
        let p0: Vec<f64> = (0..m)
            .map(|k| {
                let h = (halton(s as u64 + 1, PRIMES[k]) + shift[k]).fract();
                bx * (2.0 * h - 1.0)
            })
            .collect();
        let vals0 = eigh(&num.at(&p0)).0;
        let mut any = false;
        for j in 0..fam.n() - 1 {
            let mut p = p0.clone();
            gap_descent(&num, &dnum, &mut p, j, bx);
            let vals = eigh(&num.at(&p)).0;
            let mut u = p.clone();
            u.push(0.5 * (vals[j] + vals[j + 1]));
            let Some(u) = refine_real(&eval, &u, opts.max_iter, opts.residual_tol) else {
                continue;
            };
            if u[..m].iter().any(|v| v.abs() > bx) {
                continue;
            }
            let uc: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            let residual = complex_eval.residual(&uc);
            if residual > opts.residual_tol {
                continue;
            }
            let vals = eigh(&num.at(&u[..m])).0;
            let pair = band_pair_of(&vals, u[m]);
            let gap = vals[pair + 1] - vals[pair];
            let adjacent_ok = (pair == 0 || vals[pair] - vals[pair - 1] > 1e3 * opts.gap_tol)
                && (pair + 2 >= vals.len() || vals[pair + 2] - vals[pair + 1] > 1e3 * opts.gap_tol);
            if gap > opts.gap_tol || !adjacent_ok {
                continue;
            }
            any = true;
            merge(
                &mut points,
                WeylPoint {
                    location: uc[..m].to_vec(),
                    lambda: uc[m],
                    band_pair: Some(pair),
                    charge: None,
                    residual,
                },
                radius,
            );
        }
        let _ = vals0;
        if !any {
            unconverged += 1;
        }
    }
    sort_points(&mut points);
    if opts.charges && m == 3 {
        let locs: Vec<Vec<f64>> = points.iter().map(WeylPoint::real_location).collect();
        for (i, p) in points.iter_mut().enumerate() {
            let others: Vec<&Vec<f64>> = locs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, l)| l)
                .collect();
            p.charge = weyl_charge(&num, p, &others, bx, opts.grid).ok();
        }
    }
    let complete = expected.is_none_or(|e| points.len() <= e);
    Ok(WeylSearch {
        points,
        seeds_used: n_seeds,
        unconverged_seeds: unconverged,
        expected,
        complete,
        note: None,
    })
}

/// Charge of a real Weyl point: `c₁` of the upper band of its crossing
/// pair on a small sphere, shrunk until the neighbouring bands are gapped.
pub fn weyl_charge(
    fam: &NumericFamily,
    wp: &WeylPoint,
    others: &[&Vec<f64>],
    bx: f64,
    grid: usize,
) -> Result<i32> {
    let j = wp
        .band_pair
        .ok_or_else(|| Error::InvalidArgument("charge needs a real point with a band pair".into()))?;
    let c = wp.real_location();
    let center = [c[0], c[1], c[2]];
    let nearest = others
        .iter()
        .map(|o| o.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min);
    let mut radius = (0.25 * nearest).min(0.1 * bx);
    for _ in 0..30 {
        match chern_on_sphere(fam, center, radius, &[j + 1], grid) {
            Ok(r) if r.converged && r.cherns[0].abs() == 1 => return Ok(r.cherns[0] as i32),
            _ => radius *= 0.5,
        }
    }
    Err(Error::GapClosed(format!(
        "sphere radius underflow at {:?}: crossing too close to another degeneracy",
        c
    )))
}

/// Complex degeneracy points by deflated Newton on a square system of
/// random combinations of the minors; every candidate is verified against
/// all minors.
pub fn find_complex_weyl_points(fam: &MatrixFamily, t: f64, bx: f64, opts: &WeylOptions) -> Result<WeylSearch> {
    find_complex_weyl_points_from(fam, t, bx, opts, &[])
}

/// As [`find_complex_weyl_points`], trying `hints` (e.g. the real points)
/// as the first starts.
pub fn find_complex_weyl_points_from(
    fam: &MatrixFamily,
    t: f64,
    bx: f64,
    opts: &WeylOptions,
    hints: &[WeylPoint],
) -> Result<WeylSearch> {
    let m = fam.arity();
    let ft = fam.at_t(&exact_t(t));
    let base = fam.at_t(&Coeff::zero());
    let expected = opts.expected.or_else(|| expected_cwp(fam));
    if ft == base && fam.contains_var(Var::T) || !fam.contains_var(Var::T) {
        return unperturbed_report(fam, expected);
    }
    let (_, gens, _) = lifted_at_t(fam, t)?;
    let full = MinorEval::new(&gens, m);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let square: Vec<Poly> = (0..=m)
        .map(|_| {
            gens.iter().fold(Poly::zero(), |acc, g| {
                let r = Coeff::from_ratio(rng.random_range(-9..=9), rng.random_range(1..=7));
                &acc + &g.scale(&r)
            })
        })
        .collect();
    let sq = MinorEval::new(&square, m);
    let a: Vec<Complex64> = (0..=m)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let target = expected.unwrap_or(usize::MAX);
    let n_starts = opts.seeds.unwrap_or(200 * expected.unwrap_or(6).max(1));
    let radius = opts.merge_rel * bx;
    let mut roots: Vec<Vec<Complex64>> = Vec::new();
    let mut points: Vec<WeylPoint> = Vec::new();
    let mut unconverged = 0;
    let mut used = 0;
    let hinted: Vec<Vec<Complex64>> = hints.iter().filter(|h| h.location.len() == m).map(WeylPoint::coords).collect();
    for start in 0..n_starts + hinted.len() {
        if points.len() >= target {
            break;
        }
        used += 1;
        let z0 = match hinted.get(start) {
            Some(h) => h.clone(),
            None => {
                // log-uniform scale: roots cluster at the perturbation size
                let scale = bx * 10f64.powf(-rng.random_range(0.0..3.0));
                let mut z0: Vec<Complex64> = (0..m)
                    .map(|_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
                    .collect();
                z0.push(pair_midpoint(&ft, &z0, &mut rng));
                z0
            }
        };
        // plain Newton first; deflate only when it lands on a known root
        let comb = DMatrix::from_fn(m + 1, gens.len(), |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let plain = combined_newton(&full, &comb, z0.clone(), opts.max_iter);
        let known = |z: &Vec<Complex64>| roots.iter().any(|r| dist(r, z) <= radius.max(1e-9));
        let z = match plain {
            Some(z) if !known(&z) && full.residual(&z) <= 1e-8 => Some(z),
            _ if roots.is_empty() => None,
            _ => deflated_newton(&sq, &a, &roots, z0, opts.max_iter),
        };
        let Some(z) = z else {
            unconverged += 1;
            continue;
        };
        let Some(z) = polish(&sq, z, 20) else {
            unconverged += 1;
            continue;
        };
        roots.push(z.clone());
        if z[..m].iter().any(|v| v.norm() > bx * 2f64.sqrt()) {
            continue;
        }
        for cand in [z.clone(), z.iter().map(|v| v.conj()).collect::<Vec<_>>()] {
            let residual = full.residual(&cand);
            if residual > opts.residual_tol {
                continue;
            }
            let mut cand = cand;
            for v in cand.iter_mut() {
                if v.im.abs() <= 1e-12 * (1.0 + v.re.abs()) {
                    v.im = 0.0;
                }
            }
            let wp = WeylPoint {
                location: cand[..m].to_vec(),
                lambda: cand[m],
                band_pair: None,
                charge: None,
                residual,
            };
            // Newton error estimate; large near singular roots
            let sv = singular_values(&sq.jacobian(&cand));
            let est = sq.residual(&cand) / sv.last().copied().unwrap_or(0.0).max(1e-300);
            let r = radius.max(10.0 * est).min(1e-2 * bx);
            if merge(&mut points, wp, r) && !roots.iter().any(|q| dist(q, &cand) <= r) {
                roots.push(cand);
            }
        }
    }
    sort_points(&mut points);
    let complete = expected == Some(points.len());
    let note = (!complete).then(|| {
        format!(
            "search incomplete: found {} of {} expected complex points",
            points.len(),
            expected.map_or("?".into(), |e| e.to_string())
        )
    });
    Ok(WeylSearch {
        points,
        seeds_used: used,
        unconverged_seeds: unconverged,
        expected,
        complete,
        note,
    })
}

/// Midpoint of a random eigenvalue and its nearest neighbour at `p`.
fn pair_midpoint(ft: &MatrixFamily, p: &[Complex64], rng: &mut ChaCha8Rng) -> Complex64 {
    let Ok(m) = ft.evaluate(p) else {
        return Complex64::new(0.0, 0.0);
    };
    let ev = eigvals(&m);
    let i = rng.random_range(0..ev.len());
    let j = (0..ev.len())
        .filter(|&j| j != i)
        .min_by(|&a, &b| (ev[a] - ev[i]).norm().total_cmp(&(ev[b] - ev[i]).norm()))
        .unwrap_or(i);
    (ev[i] + ev[j]) / 2.0
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn unperturbed_report(fam: &MatrixFamily, expected: Option<usize>) -> Result<WeylSearch> {
    let base = fam.at_t(&Coeff::zero());
    let m0 = base.evaluate_full(&[Complex64::new(0.0, 0.0); NVARS]);
    let ev = eigvals(&m0);
    let mut points = Vec::new();
    for i in 0..ev.len() {
        let dup = (0..ev.len()).any(|k| k != i && (ev[k] - ev[i]).norm() < 1e-8);
        if dup && !points.iter().any(|p: &WeylPoint| (p.lambda - ev[i]).norm() < 1e-8) {
            points.push(WeylPoint {
                location: vec![Complex64::new(0.0, 0.0); fam.arity()],
                lambda: ev[i],
                band_pair: None,
                charge: None,
                residual: 0.0,
            });
        }
    }
    Ok(WeylSearch {
        points,
        seeds_used: 0,
        unconverged_seeds: 0,
        expected,
        complete: false,
        note: Some("perturbation vanishes: reporting the unperturbed multifold degeneracy".into()),
    })
}

/// Newton on `F · Π(1 + 1/⟨a, z − r_i⟩)`.
fn deflated_newton(
    sq: &MinorEval,
    a: &[Complex64],
    roots: &[Vec<Complex64>],
    mut z: Vec<Complex64>,
    max_iter: usize,
) -> Option<Vec<Complex64>> {
    let n = z.len();
    for _ in 0..max_iter {
        let f = DVector::from_vec(sq.values(&z));
        let mut jac = sq.jacobian(&z);
        let mut s = DVector::<Complex64>::zeros(n);
        for r in roots {
            let d: Complex64 = a.iter().zip(z.iter().zip(r)).map(|(ai, (zi, ri))| ai * (zi - ri)).sum();
            if d.norm() < 1e-14 {
                return None;
            }
            for k in 0..n {
                s[k] += a[k] / (d * (d + 1.0));
            }
        }
        jac -= &f * s.transpose();
        let delta = jac.lu().solve(&(-&f))?;
        for k in 0..n {
            z[k] += delta[k];
        }
        let zn = z.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        if !zn.is_finite() || zn > 1e6 {
            return None;
        }
        if delta.camax() <= 1e-13 * (1.0 + zn) {
            return Some(z);
        }
    }
    None
}

/// Newton on `C · F` for a square combination matrix `C`.
fn combined_newton(
    full: &MinorEval,
    comb: &DMatrix<Complex64>,
    mut z: Vec<Complex64>,
    max_iter: usize,
) -> Option<Vec<Complex64>> {
    for _ in 0..max_iter {
        let f = comb * DVector::from_vec(full.values(&z));
        let delta = (comb * full.jacobian(&z)).lu().solve(&(-&f))?;
        for k in 0..z.len() {
            z[k] += delta[k];
        }
        let zn = z.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
        if !zn.is_finite() || zn > 1e6 {
            return None;
        }
        if delta.camax() <= 1e-13 * (1.0 + zn) {
            return Some(z);
        }
    }
    None
}

/// Plain Newton on the square system.
fn polish(sq: &MinorEval, mut z: Vec<Complex64>, iters: usize) -> Option<Vec<Complex64>> {
    for _ in 0..iters {
        let f = DVector::from_vec(sq.values(&z));
        let delta = sq.jacobian(&z).lu().solve(&(-&f))?;
        for k in 0..z.len() {
            z[k] += delta[k];
        }
        if delta.camax() <= 1e-15 * (1.0 + z.iter().fold(0.0f64, |a, v| a.max(v.norm()))) {
            break;
        }
    }
    z.iter().all(|v| v.is_finite()).then_some(z)
}

/// Eigenvalues along the segment `from → to`, `steps + 1` samples.
pub fn dispersion_line(fam: &NumericFamily, from: &[f64], to: &[f64], steps: usize) -> Vec<(f64, Vec<f64>)> {
    (0..=steps)
        .map(|i| {
            let s = i as f64 / steps.max(1) as f64;
            let p: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + s * (b - a)).collect();
            (s, eigh(&fam.at(&p)).0)
        })
        .collect()
}

/// Eigenvalues on a regular grid of the plane spanned by the first two
/// parameters, remaining parameters fixed at `rest`.
pub fn dispersion_plane(fam: &NumericFamily, half_width: f64, steps: usize, rest: &[f64]) -> Vec<(f64, f64, Vec<f64>)> {
    let mut out = Vec::new();
    for i in 0..=steps {
        for k in 0..=steps {
            let x = -half_width + 2.0 * half_width * i as f64 / steps.max(1) as f64;
            let y = -half_width + 2.0 * half_width * k as f64 / steps.max(1) as f64;
            let mut p = vec![x, y];
            p.extend_from_slice(rest);
            p.truncate(fam.arity());
            out.push((x, y, eigh(&fam.at(&p)).0));
        }
    }
    out
}

pub fn numeric_matrix(fam: &NumericFamily, point: &[f64]) -> CMat {
    fam.at(point)
}


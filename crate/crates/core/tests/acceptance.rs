//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_change, random_linear_family};
use weylbound::chern::chern_all_bands;
use weylbound::field::rat;
use weylbound::formulas::{
    gn_hilbert_sequence, jozefiak_sequence, jozefiak_total, lower_bound_from_cherns, multiplicity_formula,
    parity_consistent, partial_sums, spin_cherns, spin_lower_bound,
};
use weylbound::localdim::{count_cwp, local_multiplicity, sample_cubic_route, sample_cubic_orbit, twofold_local_algebra, Verdict};
use weylbound::matfam::{
    band_alpha_exceptional, build_band_family, build_diagonal_linear, build_spin1_scaled, build_spin_family,
    spin1_perturbation_1, spin1_perturbation_2, MatrixFamily,
};
use weylbound::minors::check_cofactor_identities;
use weylbound::numeric::{eigh, random_hermitian, CMat};
use weylbound::spectral::{find_complex_weyl_points, find_real_weyl_points, WeylOptions, WeylPoint, WeylSearch};
use weylbound::swchart::sw_decompose;
use weylbound::{Coeff, Poly, SymmetryClass, Var};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    ensure!(t < limit, "took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs());
    Ok(format!("{:.2}s", t.as_secs_f64()))
}

const T: f64 = 0.1;

fn preset(k: u8) -> MatrixFamily {
    let dir = if k == 1 { spin1_perturbation_1() } else { spin1_perturbation_2() };
    build_spin1_scaled().perturb(&dir).unwrap()
}

fn r(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn has_point(points: &[WeylPoint], loc: [Complex64; 3], lambda: f64) -> bool {
    points.iter().any(|p| {
        p.location.iter().zip(&loc).all(|(a, b)| (a - b).norm() < 1e-8) && (p.lambda - lambda).norm() < 1e-8
    })
}

fn c1_spin_one_cwp() -> Outcome {
    let start = Instant::now();
    let res = count_cwp(&build_spin1_scaled(), &Coeff::zero(), None).map_err(|e| e.to_string())?;
    ensure!(res.total == Some(6), "total {:?}", res.total);
    ensure!(res.basis_strings() == ["1", "x", "y", "z", "l", "x^2"], "basis {:?}", res.basis_strings());
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("total 6, basis {{1,x,y,z,λ,x²}}, {t}"))
}

fn c2_preset_one() -> Outcome {
    let start = Instant::now();
    let f = preset(1);
    let o = WeylOptions::default();
    let real = find_real_weyl_points(&f, T, 1.0, &o).map_err(|e| e.to_string())?;
    ensure!(real.points.len() == 4, "{} real points", real.points.len());
    let q = 2f64.sqrt() * T;
    for sx in [1.0, -1.0] {
        for sz in [1.0, -1.0] {
            ensure!(has_point(&real.points, [r(sx * T), r(0.0), r(sz * q)], -sx * sz * q), "missing ({sx}t,0,{sz}√2t)");
        }
    }
    let cx = find_complex_weyl_points(&f, T, 1.0, &o).map_err(|e| e.to_string())?;
    ensure!(cx.points.len() == 6 && cx.complete, "{} complex points", cx.points.len());
    for s in [1.0, -1.0] {
        ensure!(
            has_point(&cx.points, [r(0.0), Complex64::new(0.0, s * T), r(0.0)], 0.0),
            "missing (0,{s}i·t,0)"
        );
    }
    // the literal (0, ±i, 0) is the t = 1 member of the same orbit
    let one = find_complex_weyl_points(&f, 1.0, 2.0, &o).map_err(|e| e.to_string())?;
    for s in [1.0, -1.0] {
        ensure!(has_point(&one.points, [r(0.0), Complex64::new(0.0, s), r(0.0)], 0.0), "t=1: missing (0,{s}i,0)");
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "4 real (±t,0,±√2t); complex (0,±i·t,0) at t=0.1 and (0,±i,0) at t=1; total 6, {t}"
    ))
}

fn c3_preset_two() -> Outcome {
    let start = Instant::now();
    let s = find_real_weyl_points(&preset(2), T, 1.0, &WeylOptions::default()).map_err(|e| e.to_string())?;
    ensure!(s.points.len() == 6, "{} real points", s.points.len());
    let y = T * (2.0 - T * T).sqrt();
    for sg in [1.0, -1.0] {
        ensure!(has_point(&s.points, [r(sg * T * T), r(0.0), r(0.0)], -T), "missing ({sg}t²,0,0)");
        ensure!(has_point(&s.points, [r(0.0), r(sg * y), r(0.0)], T), "missing (0,{sg}t√(2−t²),0)");
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("6 real points, {t}"))
}

fn c4_closed_forms() -> Outcome {
    for k in 2..=8 {
        let gn = gn_hilbert_sequence(k).unwrap();
        ensure!(gn.total == multiplicity_formula(k, SymmetryClass::Hermitian).unwrap(), "GN total k={k}");
        ensure!(gn.is_palindromic(), "GN not palindromic k={k}");
        let jz = jozefiak_sequence(k).unwrap();
        ensure!(jz.total == jozefiak_total(k).unwrap(), "Józefiak sequence total k={k}");
        ensure!(
            jozefiak_total(k).unwrap() == multiplicity_formula(k, SymmetryClass::Symmetric).unwrap(),
            "symmetric total k={k}"
        );
        ensure!(k < 3 || !jz.is_palindromic(), "Józefiak palindromic k={k}");
    }
    Ok("k = 2..8".into())
}

fn c5_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    use SymmetryClass::*;
    let cases = [
        (2, Hermitian),
        (2, General),
        (2, Symmetric),
        (2, Diagonal),
        (3, Hermitian),
        (3, General),
        (3, Symmetric),
        (3, Diagonal),
        (4, Diagonal),
        (4, Symmetric),
    ];
    for (k, class) in cases {
        let want = multiplicity_formula(k, class).unwrap() as usize;
        let mut trials = 0;
        while trials < 20 {
            let f = random_linear_family(k as usize, class, &mut rng);
            let res = count_cwp(&f, &Coeff::zero(), None).map_err(|e| e.to_string())?;
            if res.verdict == Verdict::NotIsolated {
                continue;
            }
            ensure!(res.total == Some(want), "k={k} {}: {:?} vs {want} ({:?}, {:?})", class.name(), res.total, f.rows_as_strings(), res.verdict);
            trials += 1;
        }
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("200 trials, {t}"))
}

fn c6_spin_cherns() -> Outcome {
    let start = Instant::now();
    for two_s in 1..=3 {
        let f = build_spin_family(two_s).unwrap().numeric(0.0);
        let rep = chern_all_bands(&f, [0.0; 3], 1.0, 24).map_err(|e| e.to_string())?;
        ensure!(rep.converged && rep.grid == 24, "2s={two_s} not confirmed at 48x96");
        ensure!(rep.cherns == spin_cherns(two_s), "2s={two_s}: {:?}", rep.cherns);
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("(2a) for s = 1/2, 1, 3/2, {t}"))
}

fn c7_spin_bounds() -> Outcome {
    for two_s in 1..=5 {
        let (lb, _) = lower_bound_from_cherns(&spin_cherns(two_s));
        ensure!(lb == spin_lower_bound(two_s).unwrap(), "2s={two_s}: {lb}");
    }
    ensure!(lower_bound_from_cherns(&spin_cherns(2)).0 == 4, "spin-1 bound");
    Ok("s = 1/2..5/2; spin-1 gives 4".into())
}

fn same_up_to_sign_reversal(got: &[i64], want: &[i64]) -> bool {
    let neg: Vec<i64> = want.iter().map(|v| -v).collect();
    let rev: Vec<i64> = want.iter().rev().copied().collect();
    let negrev: Vec<i64> = neg.iter().rev().copied().collect();
    [want.to_vec(), neg, rev, negrev].iter().any(|w| w == got)
}

fn c8_band_family() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut found = [0usize; 2];
    let mut log = Vec::new();
    while found.iter().any(|&n| n < 3) {
        let alpha = [0, 1, 2].map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=3)));
        if band_alpha_exceptional(&alpha) {
            continue;
        }
        let r2 = &alpha[0] * &alpha[0] + &alpha[1] * &alpha[1];
        // region 0: |α₂| < √(α₀²+α₁²); region 1: |α₂| > √(α₀²+α₁²)
        let region = usize::from(&alpha[2] * &alpha[2] > r2);
        if found[region] >= 3 {
            continue;
        }
        let f = build_band_family(&alpha);
        let res = count_cwp(&f, &Coeff::zero(), None).map_err(|e| e.to_string())?;
        ensure!(res.total == Some(20), "α={alpha:?}: count {:?}", res.total);
        let ch = chern_all_bands(&f.numeric(0.0), [0.0; 3], 1.0, 24).map_err(|e| e.to_string())?;
        let (pattern, bound) = if region == 0 { ([-3, -1, 1, 3], 10) } else { ([-3, 5, -5, 3], 8) };
        ensure!(ch.converged && same_up_to_sign_reversal(&ch.cherns, &pattern), "α={alpha:?}: {:?}", ch.cherns);
        let (lb, _) = lower_bound_from_cherns(&ch.cherns);
        ensure!(lb == bound, "α={alpha:?}: bound {lb}");
        log.push(format!("({},{},{})→{}", alpha[0], alpha[1], alpha[2], bound));
        found[region] += 1;
    }
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!("{} , {t}", log.join(" ")))
}

fn diag(v: &[f64]) -> CMat {
    DMatrix::from_fn(v.len(), v.len(), |i, j| r(if i == j { v[i] } else { 0.0 }))
}

fn c9_sw() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for a0 in [diag(&[0.0, 0.0, 1.0]), diag(&[0.0, 0.0, 0.0, 2.0])] {
        let n = a0.nrows();
        for _ in 0..50 {
            let p = random_hermitian(n, 1.0, &mut rng);
            let p = &p * r(0.05 / p.norm());
            let a = &a0 + p;
            let d = sw_decompose(&a0, r(0.0), &a, 1e-10).map_err(|e| e.to_string())?;
            ensure!(d.residual <= 1e-10, "residual {}", d.residual);
            worst = worst.max(d.residual);
            let full = eigh(&a).0;
            for e in eigh(&d.aeff_block()).0 {
                ensure!(full.iter().any(|f| (f - e).abs() <= 1e-8), "eigenvalue {e} not in spectrum");
            }
        }
    }
    Ok(format!("100 samples, worst residual {worst:.1e}"))
}

fn c10_twofold() -> Outcome {
    let f = MatrixFamily::parse(
        SymmetryClass::Symmetric,
        &[vec!["2", "x", "y"], vec!["x", "0", "0"], vec!["y", "0", "0"]],
    )
    .unwrap();
    let a = twofold_local_algebra(&f, &Coeff::zero(), None).map_err(|e| e.to_string())?;
    ensure!(a.result.total == Some(4), "dim {:?}", a.result.total);
    ensure!(a.result.basis_strings() == ["1", "x", "y", "x^2"], "basis {:?}", a.result.basis_strings());
    let coords = |e: [u32; 5]| a.quadratic_exact.iter().find(|(m, _)| *m == e).map(|(_, c)| c.clone());
    let x2 = coords([2, 0, 0, 0, 0]).ok_or("no [x²]")?;
    let y2 = coords([0, 2, 0, 0, 0]).ok_or("no [y²]")?;
    let m2l: Vec<Coeff> = a.lambda_exact.iter().map(|c| c.scale_int(-2)).collect();
    ensure!(x2 == y2 && x2 == m2l, "[x²]={x2:?} [y²]={y2:?} −2[λ]={m2l:?}");
    Ok("dim 4, basis {1,x,y,x²}, [x²]=[y²]=−2[λ]".into())
}

fn c11_cusp() -> Outcome {
    let p = |s: &str| Poly::parse(s).unwrap();
    let v = [Var::X, Var::Y];
    let a = local_multiplicity(&[p("x^2 - y^3"), p("x + y")], &v, 8).map_err(|e| e.to_string())?;
    let b = local_multiplicity(&[p("x^2 - y^3"), p("x")], &v, 8).map_err(|e| e.to_string())?;
    ensure!(a.total == Some(2), "{:?}", a.total);
    ensure!(b.total == Some(3), "{:?}", b.total);
    Ok("2 and 3".into())
}

fn bands_additivity(f: &MatrixFamily, s: &WeylSearch, radius: f64) -> Outcome {
    let num = f.numeric(T);
    let big = chern_all_bands(&num, [0.0; 3], radius, 24).map_err(|e| e.to_string())?;
    ensure!(big.cherns.iter().sum::<i64>() == 0, "sum rule {:?}", big.cherns);
    for (b, c) in big.cherns.iter().enumerate() {
        // upper band of a pair carries +charge, lower band −charge
        let local: i64 = s
            .points
            .iter()
            .map(|p| {
                let q = p.charge.unwrap_or(0) as i64;
                match p.band_pair {
                    Some(j) if j + 1 == b => q,
                    Some(j) if j == b => -q,
                    _ => 0,
                }
            })
            .sum();
        ensure!(local == *c, "band {b}: local sum {local} vs {c}");
    }
    ensure!(partial_sums(&big.cherns).len() + 1 == big.cherns.len(), "partial sums");
    Ok(String::new())
}

fn c12_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    // cofactor identities
    for i in 0..50 {
        let class = [SymmetryClass::Hermitian, SymmetryClass::General][i % 2];
        let f = random_linear_family(3 + i % 2, class, &mut rng);
        let rep = check_cofactor_identities(&f).map_err(|e| e.to_string())?;
        let n = f.n();
        ensure!(rep.relations_checked == 2 * (n * n - 1), "relations {}", rep.relations_checked);
    }
    // parity, sum rule and additivity on converged searches
    let o = WeylOptions::default();
    let mut runs = 0;
    for k in [1, 2] {
        let f = preset(k);
        let s = find_real_weyl_points(&f, T, 1.0, &o).map_err(|e| e.to_string())?;
        ensure!(parity_consistent(s.points.len() as u64, 6), "parity preset {k}");
        bands_additivity(&f, &s, 0.5)?;
        runs += 1;
    }
    let slopes = [1, 2, 3, 4].map(|v| rat(v, 1));
    let d = build_diagonal_linear(&slopes).unwrap();
    let shift = MatrixFamily::parse(
        SymmetryClass::Diagonal,
        &[vec!["3", "0", "0", "0"], vec!["0", "-1", "0", "0"], vec!["0", "0", "2", "0"], vec!["0", "0", "0", "-5"]],
    )
    .unwrap();
    let dp = d.perturb(&shift).unwrap();
    let s = find_real_weyl_points(&dp, T, 2.0, &WeylOptions { seeds: Some(300), ..o.clone() }).map_err(|e| e.to_string())?;
    let cwp = count_cwp(&d, &Coeff::zero(), None).map_err(|e| e.to_string())?.total.unwrap_or(0);
    ensure!(cwp == 6 && s.points.len() == 6, "diagonal: cwp {cwp}, real {}", s.points.len());
    ensure!(parity_consistent(6, cwp as u64), "parity diagonal");
    runs += 1;
    for two_s in 1..=3 {
        let rep = chern_all_bands(&build_spin_family(two_s).unwrap().numeric(0.0), [0.0; 3], 1.0, 12)
            .map_err(|e| e.to_string())?;
        ensure!(rep.cherns.iter().sum::<i64>() == 0, "sum rule 2s={two_s}");
    }
    // invariance under linear parameter changes
    let presets: Vec<(MatrixFamily, usize)> = vec![
        (build_spin1_scaled(), 6),
        (build_spin_family(3).unwrap(), 20),
        (d.clone(), 6),
        (build_band_family(&[rat(1, 1), rat(2, 1), rat(1, 1)]), 20),
    ];
    for (f, want) in &presets {
        for _ in 0..10 {
            let g = f.linear_change(&random_change(f.arity(), &mut rng)).map_err(|e| e.to_string())?;
            let res = count_cwp(&g, &Coeff::zero(), None).map_err(|e| e.to_string())?;
            ensure!(res.total == Some(*want), "changed family: {:?} vs {want}", res.total);
        }
    }
    Ok(format!(
        "50 cofactor checks, {runs} converged searches, 40 parameter changes, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn c13_sample_cubic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = random_linear_family(3, SymmetryClass::General, &mut rng);
    let orbit = sample_cubic_orbit(&f).map_err(|e| e.to_string())?;
    ensure!(!orbit.is_empty() && orbit.iter().all(|g| g.order() >= Some(3)), "orbit orders");
    let route = sample_cubic_route(&f, 8).map_err(|e| e.to_string())?;
    let dim = match route.total {
        Some(d) => d,
        None => route.partial_sum(),
    };
    let cwp = count_cwp(&f, &Coeff::zero(), None).map_err(|e| e.to_string())?.total;
    ensure!(cwp == Some(6), "count_cwp {cwp:?}");
    ensure!(dim >= 10 && dim > 6, "sample route dimension {dim}");
    Ok(format!(
        "{} orbit elements, quotient dim {}{} > 6 = count_cwp",
        orbit.len(),
        dim,
        if route.total.is_some() { "" } else { " (lower bound)" }
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("spin-1 cwp", c1_spin_one_cwp),
        ("spin-1 perturbation 1", c2_preset_one),
        ("spin-1 perturbation 2", c3_preset_two),
        ("closed forms vs resolutions", c4_closed_forms),
        ("oracle equivalence", c5_oracle_equivalence),
        ("spin Chern numbers", c6_spin_cherns),
        ("spin lower bounds", c7_spin_bounds),
        ("band family", c8_band_family),
        ("SW decomposition", c9_sw),
        ("two-fold local algebra", c10_twofold),
        ("cusp regression", c11_cusp),
        ("property suites", c12_properties),
        ("sample cubic route", c13_sample_cubic),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

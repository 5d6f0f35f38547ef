//! First Chern numbers of eigenvector bundles on spheres in parameter space.
//!
//! Link-variable (Fukui–Hatsugai) lattice method on a latitude/longitude
//! grid offset by half a cell from the poles; the two polar caps enter as
//! polygonal plaquettes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::partial_sums;
use crate::matfam::NumericFamily;
use crate::numeric::{eigh, CMat};

pub const DEFAULT_GRID: usize = 24;
pub const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernReport {
    pub center: [f64; 3],
    pub radius: f64,
    /// Polar resolution of the accepted grid; the azimuthal one is twice it.
    pub grid: usize,
    pub bands: Vec<usize>,
    pub cherns: Vec<i64>,
    pub converged: bool,
    /// Largest distance of a raw lattice sum from its rounded value.
    pub defect: f64,
    /// Smallest gap seen next to a requested band.
    pub min_gap: f64,
}

fn sphere_point(center: &[f64; 3], radius: f64, theta: f64, phi: f64) -> [f64; 3] {
    [
        center[0] + radius * theta.sin() * phi.cos(),
        center[1] + radius * theta.sin() * phi.sin(),
        center[2] + radius * theta.cos(),
    ]
}

fn link(a: &CMat, b: &CMat, col: usize) -> Complex64 {
    a.column(col).dotc(&b.column(col))
}

/// Berry flux through one cell of the sphere grid, in units of `2π`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxCell {
    pub band: usize,
    /// `plaquette`, `north` or `south`.
    pub kind: &'static str,
    pub i: usize,
    pub j: usize,
    /// Cell corner for plaquettes, pole for caps.
    pub theta: f64,
    pub phi: f64,
    pub flux: f64,
}

fn theta_at(i: usize, n_theta: usize) -> f64 {
    (i as f64 + 0.5) * PI / n_theta as f64
}

fn phi_at(j: usize, n_phi: usize) -> f64 {
    2.0 * PI * j as f64 / n_phi as f64
}

/// Eigenvector frames on the grid and the smallest gap next to `bands`.
fn frames(
    fam: &NumericFamily,
    center: &[f64; 3],
    radius: f64,
    bands: &[usize],
    n_theta: usize,
) -> Result<(Vec<Vec<CMat>>, f64)> {
    let n_phi = 2 * n_theta;
    let n = fam.n();
    let mut vecs: Vec<Vec<CMat>> = Vec::with_capacity(n_theta);
    let mut min_gap = f64::INFINITY;
    for i in 0..n_theta {
        let mut row = Vec::with_capacity(n_phi);
        for j in 0..n_phi {
            let p = sphere_point(center, radius, theta_at(i, n_theta), phi_at(j, n_phi));
            let (vals, v) = eigh(&fam.at(&p));
            for &b in bands {
                if b > 0 {
                    min_gap = min_gap.min(vals[b] - vals[b - 1]);
                }
                if b + 1 < n {
                    min_gap = min_gap.min(vals[b + 1] - vals[b]);
                }
            }
            row.push(v);
        }
        vecs.push(row);
    }
    if min_gap <= GAP_TOL {
        return Err(Error::GapClosed(format!(
            "gap {min_gap:.2e} on the sphere of radius {radius} around {center:?}"
        )));
    }
    Ok((vecs, min_gap))
}

fn cells(vecs: &[Vec<CMat>], b: usize) -> Vec<FluxCell> {
    let n_theta = vecs.len();
    let n_phi = 2 * n_theta;
    let mut out = Vec::with_capacity(n_theta * n_phi + 2);
    let mut north = Complex64::new(1.0, 0.0);
    let mut south = Complex64::new(1.0, 0.0);
    let last = n_theta - 1;
    for j in 0..n_phi {
        let jn = (j + 1) % n_phi;
        north *= link(&vecs[0][j], &vecs[0][jn], b);
        south *= link(&vecs[last][jn], &vecs[last][j], b);
    }
    let cap = |kind, theta, z: Complex64| FluxCell { band: b, kind, i: 0, j: 0, theta, phi: 0.0, flux: z.arg() / (2.0 * PI) };
    out.push(cap("north", 0.0, north));
    for i in 0..n_theta - 1 {
        for j in 0..n_phi {
            let jn = (j + 1) % n_phi;
            let u = link(&vecs[i][j], &vecs[i + 1][j], b)
                * link(&vecs[i + 1][j], &vecs[i + 1][jn], b)
                * link(&vecs[i + 1][jn], &vecs[i][jn], b)
                * link(&vecs[i][jn], &vecs[i][j], b);
            out.push(FluxCell {
                band: b,
                kind: "plaquette",
                i,
                j,
                theta: theta_at(i, n_theta),
                phi: phi_at(j, n_phi),
                flux: u.arg() / (2.0 * PI),
            });
        }
    }
    out.push(cap("south", PI, south));
    out
}

/// Per-cell Berry fluxes of `bands` on a `grid × 2·grid` sphere grid.
pub fn flux_grid(
    fam: &NumericFamily,
    center: [f64; 3],
    radius: f64,
    bands: &[usize],
    grid: usize,
) -> Result<Vec<FluxCell>> {
    check_args(fam, bands, grid)?;
    let (vecs, _) = frames(fam, &center, radius, bands, grid)?;
    Ok(bands.iter().flat_map(|&b| cells(&vecs, b)).collect())
}

/// Raw lattice sums (before rounding) for each requested band on one grid.
fn lattice_sums(
    fam: &NumericFamily,
    center: &[f64; 3],
    radius: f64,
    bands: &[usize],
    n_theta: usize,
) -> Result<(Vec<f64>, f64)> {
    let (vecs, gap) = frames(fam, center, radius, bands, n_theta)?;
    let sums = bands.iter().map(|&b| cells(&vecs, b).iter().map(|c| c.flux).sum()).collect();
    Ok((sums, gap))
}

fn check_args(fam: &NumericFamily, bands: &[usize], grid: usize) -> Result<()> {
    if fam.arity() != 3 {
        return Err(Error::InvalidArgument("Chern numbers need a 3-parameter family".into()));
    }
    if let Some(&b) = bands.iter().find(|&&b| b >= fam.n()) {
        return Err(Error::InvalidArgument(format!("band {b} out of range")));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2".into()));
    }
    Ok(())
}

/// Chern numbers of `bands` (ascending band indices) on the sphere.
/// Accepted when resolutions `grid` and `2·grid` agree, or failing that
/// `2·grid` and `4·grid`.
pub fn chern_on_sphere(
    fam: &NumericFamily,
    center: [f64; 3],
    radius: f64,
    bands: &[usize],
    grid: usize,
) -> Result<ChernReport> {
    check_args(fam, bands, grid)?;
    let mut prev: Option<(Vec<i64>, f64, f64, usize)> = None;
    for g in [grid, 2 * grid, 4 * grid] {
        let (sums, gap) = lattice_sums(fam, &center, radius, bands, g)?;
        let rounded: Vec<i64> = sums.iter().map(|s| s.round() as i64).collect();
        let defect = sums
            .iter()
            .zip(&rounded)
            .map(|(s, r)| (s - *r as f64).abs())
            .fold(0.0, f64::max);
        if let Some((p, pd, pgap, pg)) = &prev {
            if *p == rounded {
                return Ok(ChernReport {
                    center,
                    radius,
                    grid: *pg,
                    bands: bands.to_vec(),
                    cherns: rounded,
                    converged: true,
                    defect: pd.max(defect),
                    min_gap: pgap.min(gap),
                });
            }
        }
        prev = Some((rounded, defect, gap, g));
    }
    let (cherns, defect, min_gap, g) = prev.expect("three grids evaluated");
    Ok(ChernReport {
        center,
        radius,
        grid: g,
        bands: bands.to_vec(),
        cherns,
        converged: false,
        defect,
        min_gap,
    })
}

/// Chern numbers of every band.
pub fn chern_all_bands(fam: &NumericFamily, center: [f64; 3], radius: f64, grid: usize) -> Result<ChernReport> {
    let bands: Vec<usize> = (0..fam.n()).collect();
    chern_on_sphere(fam, center, radius, &bands, grid)
}

/// Signed algebraic Weyl point counts `−Σ_{i≤j} c_i` of consecutive band
/// pairs inside `cluster` (a range of band indices).
pub fn alg_counts_per_pair(cherns: &[i64], cluster: std::ops::Range<usize>) -> Result<Vec<i64>> {
    if cluster.end > cherns.len() || cluster.start >= cluster.end {
        return Err(Error::InvalidArgument("cluster outside the band list".into()));
    }
    Ok(partial_sums(&cherns[cluster]))
}

/// True when every band has Chern number 0 on the sphere, as it must for a
/// sphere bounding a degeneracy-free ball.
pub fn charge_zero_check(fam: &NumericFamily, center: [f64; 3], radius: f64, grid: usize) -> Result<bool> {
    let r = chern_all_bands(fam, center, radius, grid)?;
    Ok(r.converged && r.cherns.iter().all(|&c| c == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfam::build_spin_family;

    #[test]
    fn spin_half() {
        let f = build_spin_family(1).unwrap().numeric(0.0);
        let r = chern_all_bands(&f, [0.0; 3], 1.0, 12).unwrap();
        assert_eq!(r.cherns, vec![-1, 1]);
        assert!(r.converged);
        assert!(r.defect < 0.05);
    }

    #[test]
    fn flux_grid_sums_to_chern() {
        let f = build_spin_family(1).unwrap().numeric(0.0);
        let cells = flux_grid(&f, [0.0; 3], 1.0, &[0], 8).unwrap();
        assert_eq!(cells.len(), 7 * 16 + 2);
        let total: f64 = cells.iter().map(|c| c.flux).sum();
        assert!((total + 1.0).abs() < 0.05);
    }

    #[test]
    fn spin_one_and_empty_ball() {
        let f = build_spin_family(2).unwrap().numeric(0.0);
        let r = chern_all_bands(&f, [0.0; 3], 1.0, 12).unwrap();
        assert_eq!(r.cherns, vec![-2, 0, 2]);
        assert!(charge_zero_check(&f, [0.0, 0.0, 5.0], 1.0, 12).unwrap());
    }

    #[test]
    fn gap_closure_is_reported() {
        let f = build_spin_family(1).unwrap().numeric(0.0);
        // sphere through the degeneracy at a grid node
        let p = sphere_point(&[0.0; 3], 1.0, PI / 12.0, 0.0);
        let err = chern_all_bands(&f, [-p[0], -p[1], -p[2]], 1.0, 6).unwrap_err();
        assert!(matches!(err, Error::GapClosed(_)), "{err:?}");
    }

    #[test]
    fn pair_counts() {
        assert_eq!(alg_counts_per_pair(&[-2, 0, 2], 0..3).unwrap(), vec![2, 2]);
        assert_eq!(alg_counts_per_pair(&[-3, 5, -5, 3], 0..4).unwrap(), vec![3, -2, 3]);
    }
}

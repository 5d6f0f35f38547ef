//! Exact sparse Gaussian elimination over [`Coeff`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::field::{Coeff, GaussianRational};

pub type SparseRow = BTreeMap<usize, Coeff>;

/// Row echelon form grown one vector at a time. Pivot rows are normalized
/// to leading coefficient 1 and only have entries at columns `≥` the pivot.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(v: &mut SparseRow, a: &Coeff, row: &SparseRow) {
    for (c, x) in row {
        let d = a * x;
        match v.get_mut(c) {
            Some(e) => {
                *e -= &d;
                if e.is_zero() {
                    v.remove(c);
                }
            }
            None => {
                v.insert(*c, -d);
            }
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Remainder of `v` modulo the row space.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let mut cursor = 0;
        loop {
            let hit = v
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            match hit {
                None => return v,
                Some((c, x)) => {
                    axpy(&mut v, &x, &self.pivots[&c]);
                    cursor = c + 1;
                }
            }
        }
    }

    /// Adds `v` to the row space; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let r = self.reduce(v);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        let row: SparseRow = r.iter().map(|(c, x)| (*c, x * &inv)).collect();
        self.pivots.insert(p, row);
        true
    }

    pub fn contains(&self, v: SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// Basis of the right kernel `{c : row · c = 0 for all rows}` in
    /// `ncols` dimensions, one vector per free column (ascending).
    pub fn kernel(&self, ncols: usize) -> Vec<Vec<Coeff>> {
        // back-substitute to reduced form
        let keys: Vec<usize> = self.pivots.keys().copied().collect();
        let mut rref: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for &p in keys.iter().rev() {
            let mut row = self.pivots[&p].clone();
            let later: Vec<(usize, Coeff)> = row
                .range(p + 1..)
                .filter(|(c, _)| rref.contains_key(c))
                .map(|(c, x)| (*c, x.clone()))
                .collect();
            for (c, x) in later {
                axpy(&mut row, &x, &rref[&c]);
            }
            rref.insert(p, row);
        }
        let mut out = Vec::new();
        for f in (0..ncols).filter(|c| !rref.contains_key(c)) {
            let mut v = vec![Coeff::zero(); ncols];
            v[f] = Coeff::one();
            for (p, row) in &rref {
                if let Some(x) = row.get(&f) {
                    v[*p] = -x;
                }
            }
            out.push(v);
        }
        out
    }
}

pub fn dense_to_sparse(v: &[Coeff]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Solve `a · c = b` for a consistent system with full column rank.
/// `a` is given row-major. Returns `None` when inconsistent or singular.
pub fn solve(a: &[Vec<Coeff>], b: &[Coeff]) -> Option<Vec<Coeff>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Coeff>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..ncols {
        let p = (r..m.len()).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = m[r][c].inv()?;
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some(m[..ncols].iter().map(|row| row[ncols].clone()).collect())
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_residue(a: u64, p: u64) -> bool {
    a % p == 0 || pow_mod(a % p, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks; `a` must be a quadratic residue.
fn sqrt_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let (mut q, mut s) = (p - 1, 0);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..).find(|&z| !is_residue(z, p)).unwrap();
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, (q + 1) / 2, p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Ring map from the coefficient field onto `F_p`, fixed by a choice of
/// `i` and of `√q` for every prime `q` dividing a radicand.
///
/// Images of linearly independent rows stay independent, so ranks mod `p`
/// bound exact ranks from below.
#[derive(Clone, Debug)]
pub struct ModMap {
    p: u64,
    i: u64,
    primes: Vec<u64>,
    roots: HashMap<u64, u64>,
}

impl ModMap {
    /// Picks the largest suitable prime below `2^62`.
    pub fn for_radicands(radicands: impl IntoIterator<Item = u64>) -> Self {
        Self::nth(radicands, 0)
    }

    /// The `k`-th suitable prime counting down from `2^62`.
    pub fn nth(radicands: impl IntoIterator<Item = u64>, k: usize) -> Self {
        let mut primes: Vec<u64> = radicands.into_iter().flat_map(prime_factors).collect();
        primes.sort_unstable();
        primes.dedup();
        let mut p = (1u64 << 62) - 3;
        let mut seen = 0;
        loop {
            if p % 4 == 1 && is_prime(p) && primes.iter().all(|&q| is_residue(q, p)) {
                if seen == k {
                    break;
                }
                seen += 1;
            }
            p -= 2;
        }
        let i = sqrt_mod(p - 1, p);
        let roots = primes.iter().map(|&q| (q, sqrt_mod(q, p))).collect();
        Self { p, i, primes, roots }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// Number of conjugate embeddings through the same prime.
    pub fn conjugates(&self) -> usize {
        1 << (self.primes.len() + 1)
    }

    /// Conjugate map: bit 0 flips `i`, bit `j+1` flips `√q_j`.
    pub fn conjugate(&self, signs: usize) -> Self {
        let flip = |x: u64, b: usize| if signs >> b & 1 == 1 { (self.p - x) % self.p } else { x };
        Self {
            p: self.p,
            i: flip(self.i, 0),
            primes: self.primes.clone(),
            roots: self.primes.iter().enumerate().map(|(j, q)| (*q, flip(self.roots[q], j + 1))).collect(),
        }
    }

    fn rational(&self, q: &BigRational) -> Option<u64> {
        let p = BigInt::from(self.p);
        let n = q.numer().mod_floor(&p).to_u64()?;
        let d = q.denom().mod_floor(&p).to_u64()?;
        (d != 0).then(|| mul_mod(n, pow_mod(d, self.p - 2, self.p), self.p))
    }

    fn gaussian(&self, g: &GaussianRational) -> Option<u64> {
        let re = self.rational(&g.re)?;
        let im = self.rational(&g.im)?;
        Some((re + mul_mod(im, self.i, self.p)) % self.p)
    }

    /// `None` when a denominator vanishes mod `p` or a radicand is unknown.
    pub fn image(&self, c: &Coeff) -> Option<u64> {
        let mut acc = 0;
        for (r, g) in c.terms() {
            let mut root = 1;
            for q in prime_factors(*r) {
                root = mul_mod(root, *self.roots.get(&q)?, self.p);
            }
            acc = (acc + mul_mod(self.gaussian(g)?, root, self.p)) % self.p;
        }
        Some(acc)
    }

    fn image_row(&self, row: &SparseRow, ncols: usize) -> Option<Vec<u64>> {
        let mut out = vec![0; ncols];
        for (c, x) in row {
            out[*c] = self.image(x)?;
        }
        Some(out)
    }
}

/// Reduced row echelon form over `F_p`: pivot columns and pivot rows.
fn rref_mod(mut rows: Vec<Vec<u64>>, ncols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        let lead: Vec<u64> = rows[rank].iter().map(|&x| mul_mod(x, inv, p)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            let f = row[col];
            if r == rank || f == 0 {
                continue;
            }
            for (x, &l) in row[col..].iter_mut().zip(&lead[col..]) {
                *x = (*x + p - mul_mod(f, l, p)) % p;
            }
        }
        rows[rank] = lead;
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (pivots, rows)
}

/// Rank of dense rows over `F_p`.
pub fn rank_mod(rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    rref_mod(rows, ncols, p).0.len()
}

/// Kernel basis mod `p` in the layout of [`Echelon::kernel`].
fn kernel_mod(pivots: &[usize], rref: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0; ncols];
            v[f] = 1;
            for (j, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rref[j][f]) % p;
            }
            v
        })
        .collect()
}

fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::from(0), BigInt::from(1));
    while r1 > bound {
        let q = &r0 / &r1;
        (r0, r1) = (r1.clone(), &r0 - &q * &r1);
        (t0, t1) = (t1.clone(), &t0 - &q * &t1);
    }
    if t1 == BigInt::from(0) || t1.abs() > bound {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

const MAX_PRIMES: usize = 48;

/// Exact rank and exact [`Echelon::kernel`] basis, certified through
/// modular images.
///
/// The rank mod `p` bounds the rank from below; the kernel is lifted from
/// the conjugate images by CRT and rational reconstruction and checked
/// against every row, which bounds it from above. `None` when lifting fails.
pub fn certified_kernel(rows: &[SparseRow], ncols: usize) -> Option<(usize, Vec<Vec<Coeff>>)> {
    let radicands: Vec<u64> = rows.iter().flat_map(|r| r.values().flat_map(|c| c.radicands())).collect();
    let mut reference: Option<Vec<usize>> = None;
    // residues[vector][entry][coordinate]
    let mut residues: Vec<Vec<Vec<BigInt>>> = Vec::new();
    let mut modulus = BigInt::from(1);
    let mut last: Option<Vec<Vec<Coeff>>> = None;
    let mut basis_roots: Vec<u64> = Vec::new();
    'primes: for k in 0..MAX_PRIMES {
        let base = ModMap::nth(radicands.iter().copied(), k);
        let p = base.prime();
        let n = base.conjugates();
        if basis_roots.is_empty() {
            basis_roots = (0..n / 2)
                .map(|s| base.primes.iter().enumerate().filter(|(j, _)| s >> j & 1 == 1).map(|(_, q)| q).product())
                .collect();
        }
        let mut kernels = Vec::with_capacity(n);
        for signs in 0..n {
            let m = base.conjugate(signs);
            let Some(img) = rows.iter().map(|r| m.image_row(r, ncols)).collect::<Option<Vec<_>>>() else {
                continue 'primes;
            };
            let (piv, rref) = rref_mod(img, ncols, p);
            if piv.len() == ncols {
                return Some((ncols, vec![]));
            }
            let better = reference
                .as_ref()
                .is_none_or(|r| piv.len() > r.len() || (piv.len() == r.len() && piv < *r));
            if better {
                reference = Some(piv.clone());
                residues.clear();
                modulus = BigInt::from(1);
                last = None;
                if signs > 0 {
                    continue 'primes;
                }
            } else if reference.as_ref() != Some(&piv) {
                continue 'primes;
            }
            kernels.push(kernel_mod(&piv, &rref, ncols, p));
        }
        // coordinates in the basis √r_S, i√r_S
        let inv_n = pow_mod(n as u64 % p, p - 2, p);
        let inv_i = pow_mod(base.i, p - 2, p);
        let nvec = kernels[0].len();
        let mut coords = vec![vec![vec![0u64; n]; ncols]; nvec];
        for (v, cv) in coords.iter_mut().enumerate() {
            for (e, ce) in cv.iter_mut().enumerate() {
                for (sidx, r) in basis_roots.iter().enumerate() {
                    let root = base.image(&Coeff::radical(GaussianRational::one(), *r)).unwrap();
                    let inv_root = pow_mod(root, p - 2, p);
                    let (mut re, mut im) = (0u64, 0u64);
                    for (signs, ker) in kernels.iter().enumerate() {
                        let chi_flip = (signs >> 1) & sidx;
                        let mut x = ker[v][e];
                        if chi_flip.count_ones() % 2 == 1 {
                            x = (p - x) % p;
                        }
                        re = (re + x) % p;
                        let y = if signs & 1 == 1 { (p - x) % p } else { x };
                        im = (im + y) % p;
                    }
                    ce[2 * sidx] = mul_mod(mul_mod(re, inv_n, p), inv_root, p);
                    ce[2 * sidx + 1] = mul_mod(mul_mod(mul_mod(im, inv_n, p), inv_root, p), inv_i, p);
                }
            }
        }
        let pb = BigInt::from(p);
        if residues.is_empty() {
            residues = coords
                .iter()
                .map(|v| v.iter().map(|e| e.iter().map(|&x| BigInt::from(x)).collect()).collect())
                .collect();
        } else {
            let minv = BigInt::from(pow_mod((&modulus % &pb).to_u64().unwrap(), p - 2, p));
            for (rv, cv) in residues.iter_mut().zip(&coords) {
                for (re, ce) in rv.iter_mut().zip(cv) {
                    for (r, &x) in re.iter_mut().zip(ce) {
                        let delta = ((BigInt::from(x) - &*r) * &minv).mod_floor(&pb);
                        *r += &modulus * delta;
                    }
                }
            }
        }
        modulus *= &pb;
        let lifted: Option<Vec<Vec<Coeff>>> = residues
            .iter()
            .map(|v| {
                v.iter()
                    .map(|e| {
                        let mut c = Coeff::zero();
                        for (sidx, r) in basis_roots.iter().enumerate() {
                            let re = rational_reconstruct(&e[2 * sidx], &modulus)?;
                            let im = rational_reconstruct(&e[2 * sidx + 1], &modulus)?;
                            c += &Coeff::radical(GaussianRational::new(re, im), *r);
                        }
                        Some(c)
                    })
                    .collect()
            })
            .collect();
        let Some(lifted) = lifted else { continue };
        if last.as_ref() == Some(&lifted) {
            let ok = rows.iter().all(|row| {
                lifted.iter().all(|v| {
                    let mut acc = Coeff::zero();
                    for (c, x) in row {
                        acc += &(x * &v[*c]);
                    }
                    acc.is_zero()
                })
            });
            if ok {
                return Some((ncols - lifted.len(), lifted));
            }
        }
        last = Some(lifted);
    }
    None
}

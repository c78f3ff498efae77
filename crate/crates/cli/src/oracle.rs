//! Naive re-computations used to certify the optimized library routines.
//!
//! Nothing here calls into the library's algorithms. Lattice data arrives as
//! plain integer matrices, finite-field elements are handled by a separate
//! polynomial implementation over the same modulus, and every search is a
//! full scan of its box or Grassmannian.

use std::collections::{BTreeSet, HashSet, VecDeque};

use enriq_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Matrix = Vec<Vec<i64>>;

fn cap(what: &'static str, limit: u128) -> Error {
    Error::CapExceeded { what, cap: limit }
}

// ---------------------------------------------------------------------------
// bounded vector search

/// Gauss-Jordan over the rationals. Returns the pivots of an LDLᵀ-style
/// elimination (for the definiteness test) and the diagonal of the inverse.
fn pivots_and_inverse_diagonal(gram: &[Vec<i64>]) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let n = gram.len();
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = gram[i].iter().map(|&x| r(x)).collect();
            row.extend((0..n).map(|j| r(i64::from(i == j))));
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(n);
    // no row swaps: a zero leading minor already rules out definiteness
    for c in 0..n {
        if a[c][c].is_zero() {
            return None;
        }
        pivots.push(a[c][c].clone());
        let inv = BigRational::from_integer(BigInt::from(1)) / a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    let diag = (0..n).map(|i| a[i][n + i].clone()).collect();
    Some((pivots, diag))
}

/// Every `x` with `xᵀ G x = t` in a definite lattice, by scanning the box
/// `x_i² ≤ |t| · |(G⁻¹)_ii|` coordinate by coordinate.
pub fn box_vectors(gram: &[Vec<i64>], t: i64, budget: u128) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    if n == 0 {
        return Ok(if t == 0 { vec![vec![]] } else { vec![] });
    }
    let (pivots, inv_diag) =
        pivots_and_inverse_diagonal(gram).ok_or(Error::Definiteness { expected: "definite" })?;
    let negative = pivots.iter().all(|p| p.is_negative());
    let positive = pivots.iter().all(|p| p.is_positive());
    if !(negative || positive) {
        return Err(Error::Definiteness { expected: "definite" });
    }
    if (negative && t > 0) || (positive && t < 0) {
        return Ok(vec![]);
    }
    let bounds: Vec<i64> = inv_diag
        .iter()
        .map(|d| {
            let limit = d.abs() * BigInt::from(t.abs());
            let mut b: i64 = 0;
            while BigRational::from_integer(BigInt::from((b + 1) * (b + 1))) <= limit {
                b += 1;
            }
            b
        })
        .collect();
    let volume = bounds.iter().fold(1u128, |acc, b| acc.saturating_mul(2 * *b as u128 + 1));
    if volume > budget {
        return Err(cap("box search", budget));
    }

    // odometer over the box, keeping y = Gx and Q = xᵀGx current
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    let mut y: Vec<i128> = (0..n)
        .map(|i| (0..n).map(|j| gram[i][j] as i128 * x[j] as i128).sum())
        .collect();
    let mut q: i128 = (0..n).map(|i| x[i] as i128 * y[i]).sum();
    let mut out = Vec::new();
    loop {
        if q == t as i128 {
            out.push(x.clone());
        }
        let mut i = 0;
        while i < n && x[i] == bounds[i] {
            i += 1;
        }
        if i == n {
            break;
        }
        // reset coordinates below i, then step coordinate i
        for k in 0..i {
            let d = (-bounds[k] - x[k]) as i128;
            q += 2 * d * y[k] + d * d * gram[k][k] as i128;
            for (r, yr) in y.iter_mut().enumerate() {
                *yr += d * gram[r][k] as i128;
            }
            x[k] = -bounds[k];
        }
        q += 2 * y[i] + gram[i][i] as i128;
        for (r, yr) in y.iter_mut().enumerate() {
            *yr += gram[r][i] as i128;
        }
        x[i] += 1;
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// full isometry groups

fn dot(gram: &[Vec<i64>], a: &[i64], b: &[i64]) -> i128 {
    let n = gram.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[i] as i128 * gram[i][j] as i128 * b[j] as i128).sum::<i128>())
        .sum()
}

/// Every isometry of a definite lattice, as matrices whose columns are the
/// images of the basis vectors, sorted.
pub fn group_expand(gram: &[Vec<i64>], box_budget: u128, element_budget: usize) -> Result<Vec<Matrix>> {
    let n = gram.len();
    let candidates: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| box_vectors(gram, gram[i][i], box_budget))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut chosen: Vec<&Vec<i64>> = Vec::new();
    fn go<'a>(
        gram: &[Vec<i64>],
        candidates: &'a [Vec<Vec<i64>>],
        chosen: &mut Vec<&'a Vec<i64>>,
        out: &mut Vec<Matrix>,
        budget: usize,
    ) -> Result<()> {
        let k = chosen.len();
        let n = gram.len();
        if k == n {
            if out.len() >= budget {
                return Err(cap("group element", budget as u128));
            }
            out.push((0..n).map(|r| (0..n).map(|c| chosen[c][r]).collect()).collect());
            return Ok(());
        }
        for v in &candidates[k] {
            if (0..k).all(|j| dot(gram, chosen[j], v) == gram[j][k] as i128) {
                chosen.push(v);
                go(gram, candidates, chosen, out, budget)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    go(gram, &candidates, &mut chosen, &mut out, element_budget)?;
    out.sort();
    Ok(out)
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let s: i128 = (0..n).map(|k| a[i][k] as i128 * b[k][j] as i128).sum();
            out[i][j] = i64::try_from(s).map_err(|_| Error::Overflow("oracle group closure"))?;
        }
    }
    Ok(out)
}

/// The group generated by `generators`, by breadth-first closure.
pub fn closure(generators: &[Matrix], n: usize, budget: usize) -> Result<Vec<Matrix>> {
    let id: Matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut seen: HashSet<Matrix> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = mat_mul(g, &x)?;
            if seen.insert(y.clone()) {
                if seen.len() > budget {
                    return Err(cap("group element", budget as u128));
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Matrix> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// finite fields by polynomial arithmetic

/// `F_p[t]/(f)` with elements stored as base-`p` digit codes, lowest degree
/// first. Every product is a fresh polynomial multiplication and reduction.
#[derive(Clone, Debug)]
pub struct SlowField {
    pub p: u32,
    pub m: usize,
    modulus: Vec<u32>,
}

impl SlowField {
    /// `modulus` lists coefficients lowest degree first; a missing leading
    /// 1 is supplied.
    pub fn new(p: u32, m: usize, modulus: &[u32]) -> SlowField {
        let mut modulus = modulus.to_vec();
        if modulus.len() == m {
            modulus.push(1);
        }
        assert_eq!(modulus.len(), m + 1);
        assert_eq!(modulus[m], 1);
        SlowField { p, m, modulus }
    }

    pub fn size(&self) -> u32 {
        self.p.pow(self.m as u32)
    }

    pub fn digits(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0; self.m];
        for x in d.iter_mut() {
            *x = a % self.p;
            a /= self.p;
        }
        d
    }

    pub fn code(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        self.code(&x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.code(&self.digits(a).iter().map(|u| (self.p - u) % self.p).collect::<Vec<_>>())
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.m];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        for d in (self.m..2 * self.m).rev() {
            let c = prod[d];
            if c != 0 {
                for (k, &f) in self.modulus.iter().enumerate() {
                    let idx = d - self.m + k;
                    prod[idx] = (prod[idx] + (p - c) * f as u64) % p;
                }
            }
        }
        self.code(&prod[..self.m].iter().map(|&c| c as u32).collect::<Vec<_>>())
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut out = self.from_int(1);
        for _ in 0..e {
            out = self.mul(out, a);
        }
        out
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert_ne!(a, 0);
        self.pow(a, self.size() as u64 - 2)
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
}

/// Reduced row echelon form over `f`, zero rows dropped.
pub fn rref(f: &SlowField, rows: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut a: Vec<Vec<u32>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let inv = f.inv(a[r][c]);
        a[r] = a[r].iter().map(|&x| f.mul(x, inv)).collect();
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let factor = a[i][c];
                a[i] = (0..cols).map(|j| f.sub(a[i][j], f.mul(factor, a[r][j]))).collect();
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

fn bilinear(f: &SlowField, gram: &[Vec<u32>], x: &[u32], y: &[u32]) -> u32 {
    let n = gram.len();
    let mut s = 0;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        for j in 0..n {
            if gram[i][j] != 0 && y[j] != 0 {
                s = f.add(s, f.mul(f.mul(x[i], gram[i][j]), y[j]));
            }
        }
    }
    s
}

fn reduce_gram(p: u32, gram: &[Vec<i64>]) -> Vec<Vec<u32>> {
    gram.iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// isotropic subspaces over the prime field

/// A totally isotropic subspace of half the dimension, found by a full
/// depth-first search over vectors of `F_p^n`, or `None` if there is none.
pub fn iso_subspaces(p: u32, gram: &[Vec<i64>]) -> Result<Option<Vec<Vec<u32>>>> {
    let n = gram.len();
    if n % 2 == 1 {
        return Err(Error::Precondition("odd dimension has no half-dimensional subspaces".into()));
    }
    let f = SlowField::new(p, 1, &[0]);
    let g = reduce_gram(p, gram);
    let total = (p as u64).pow(n as u32);
    let isotropic: Vec<Vec<u32>> = (1..total)
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let d = (c % p as u64) as u32;
                    c /= p as u64;
                    d
                })
                .collect::<Vec<u32>>()
        })
        .filter(|v| bilinear(&f, &g, v, v) == 0)
        .collect();
    fn go(f: &SlowField, g: &[Vec<u32>], iso: &[Vec<u32>], start: usize, chosen: &mut Vec<Vec<u32>>, want: usize) -> bool {
        if chosen.len() == want {
            return true;
        }
        for (i, v) in iso.iter().enumerate().skip(start) {
            if chosen.iter().all(|c| bilinear(f, g, c, v) == 0) {
                chosen.push(v.clone());
                if rref(f, chosen).len() == chosen.len() && go(f, g, iso, i + 1, chosen, want) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(go(&f, &g, &isotropic, 0, &mut chosen, n / 2).then(|| rref(&f, &chosen)))
}

// ---------------------------------------------------------------------------
// generatrix census

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenCensus {
    pub scanned: u128,
    /// Bases in reduced echelon form, entries as field codes.
    pub isotropic: Vec<Vec<Vec<u32>>>,
    pub characteristic: Vec<Vec<Vec<u32>>>,
    pub strict: Vec<Vec<Vec<u32>>>,
}

fn gaussian_binomial(q: u128, n: usize, k: usize) -> u128 {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul(q.saturating_pow((n - i) as u32).saturating_sub(1));
        den = den.saturating_mul(q.saturating_pow((i + 1) as u32) - 1);
    }
    if num == u128::MAX {
        u128::MAX
    } else {
        num / den
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Scans every half-dimensional subspace of `V ⊗ F_{p^m}` and sorts them
/// into isotropic, characteristic and strictly characteristic ones.
pub fn gen_census(f: &SlowField, gram: &[Vec<i64>], budget: u128) -> Result<GenCensus> {
    let n = gram.len();
    if n % 2 == 1 {
        return Err(Error::Precondition("odd dimension has no generatrices".into()));
    }
    let k = n / 2;
    let q = f.size();
    let total = gaussian_binomial(q as u128, n, k);
    if total > budget {
        return Err(cap("Grassmannian", budget));
    }
    let g = reduce_gram(f.p, gram);
    let frob = |rows: &[Vec<u32>]| -> Vec<Vec<u32>> {
        rows.iter().map(|r| r.iter().map(|&x| f.frobenius(x)).collect()).collect()
    };
    let mut census = GenCensus::default();
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| ((pivots[r] + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let count = (q as u64).pow(free.len() as u32);
        for mut code in 0..count {
            let mut rows = vec![vec![0u32; n]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for &(r, c) in &free {
                rows[r][c] = (code % q as u64) as u32;
                code /= q as u64;
            }
            census.scanned += 1;
            let isotropic = (0..k).all(|i| (i..k).all(|j| bilinear(f, &g, &rows[i], &rows[j]) == 0));
            if !isotropic {
                continue;
            }
            let mut translates = rows.clone();
            let mut current = rows.clone();
            let mut first = None;
            for _ in 1..f.m.max(1) {
                current = frob(&current);
                translates.extend(current.iter().cloned());
                first.get_or_insert_with(|| rref(f, &[rows.clone(), current.clone()].concat()).len());
            }
            let with_first = first.unwrap_or(k);
            let characteristic = with_first == k + 1;
            let strict = characteristic && rref(f, &translates).len() == n;
            if strict {
                census.strict.push(rows.clone());
            }
            if characteristic {
                census.characteristic.push(rows.clone());
            }
            census.isotropic.push(rows);
        }
    }
    for list in [&mut census.isotropic, &mut census.characteristic, &mut census.strict] {
        list.sort();
    }
    Ok(census)
}

// ---------------------------------------------------------------------------
// orbits by full expansion

pub struct OrbitProblem<'a> {
    pub gram: &'a [Vec<i64>],
    pub p: u32,
    /// Vectors of `pN^∨` whose residues form the basis of `N_0` in which
    /// the generatrices are written.
    pub lifts: &'a [Vec<i64>],
    pub generators: &'a [Matrix],
    pub field: &'a SlowField,
    /// Generatrix bases in `N_0` coordinates, entries as field codes.
    pub generatrices: &'a [Vec<Vec<u32>>],
    pub element_budget: usize,
}

pub struct OrbitResult {
    pub group_order: usize,
    /// Indices into the input list, each class sorted, classes sorted.
    pub classes: Vec<Vec<usize>>,
}

/// Expands the group, moves every generatrix by every element inside
/// `F_{p^m}^n` (through the lifts) and groups the inputs by orbit.
pub fn orbit_brute(problem: &OrbitProblem) -> Result<OrbitResult> {
    let n = problem.gram.len();
    let p = problem.p as i64;
    let f = problem.field;
    for lift in problem.lifts {
        let in_dual = (0..n).all(|i| (0..n).map(|j| problem.gram[i][j] * lift[j]).sum::<i64>() % p == 0);
        if !in_dual {
            return Err(Error::Precondition("a lift does not lie in pN^∨".into()));
        }
    }
    for g in problem.generators {
        for a in 0..n {
            for b in 0..n {
                let col_a: Vec<i64> = g.iter().map(|r| r[a]).collect();
                let col_b: Vec<i64> = g.iter().map(|r| r[b]).collect();
                if dot(problem.gram, &col_a, &col_b) != problem.gram[a][b] as i128 {
                    return Err(Error::NotIsometry("oracle generator".into()));
                }
            }
        }
    }
    let group = closure(problem.generators, n, problem.element_budget)?;
    let lifts_mod: Vec<Vec<u32>> = problem.lifts.iter().map(|l| l.iter().map(|&x| f.from_int(x)).collect()).collect();
    let to_ambient = |rows: &Vec<Vec<u32>>| -> Vec<Vec<u32>> {
        rows.iter()
            .map(|w| {
                (0..n)
                    .map(|c| {
                        w.iter()
                            .zip(&lifts_mod)
                            .fold(0, |acc, (&wi, l)| f.add(acc, f.mul(wi, l[c])))
                    })
                    .collect()
            })
            .collect()
    };
    let apply = |g: &Matrix, rows: &[Vec<u32>]| -> Vec<Vec<u32>> {
        let rows: Vec<Vec<u32>> = rows
            .iter()
            .map(|v| {
                (0..n)
                    .map(|i| (0..n).fold(0, |acc, j| f.add(acc, f.mul(f.from_int(g[i][j]), v[j]))))
                    .collect()
            })
            .collect();
        rref(f, &rows)
    };
    let keys: Vec<Vec<Vec<u32>>> = problem.generatrices.iter().map(|g| rref(f, &to_ambient(g))).collect();
    let mut assigned = vec![false; keys.len()];
    let mut classes = Vec::new();
    for i in 0..keys.len() {
        if assigned[i] {
            continue;
        }
        let orbit: BTreeSet<Vec<Vec<u32>>> = group.iter().map(|g| apply(g, &keys[i])).collect();
        let class: Vec<usize> = (i..keys.len()).filter(|&j| orbit.contains(&keys[j])).collect();
        for &j in &class {
            assigned[j] = true;
        }
        classes.push(class);
    }
    Ok(OrbitResult {
        group_order: group.len(),
        classes,
    })
}

/// Converts a `BigInt` matrix to machine integers for the oracles.
pub fn small(rows: &[Vec<BigInt>]) -> Result<Matrix> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or(Error::Overflow("oracle input")))
                .collect()
        })
        .collect()
}

//! Exhaustive enumeration of half-dimensional isotropic subspaces.
//!
//! Subspaces are generated directly in reduced echelon form, one pivot
//! pattern at a time, and rows are added only while the partial span stays
//! totally isotropic.

use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::field::{galois_field, Element, GaloisField};
use super::space::FiniteQuadraticSpace;
use super::subspace::{Generatrix, Subspace};

pub const DEFAULT_GRASSMANNIAN_BUDGET: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratrixFilter {
    Isotropic,
    Characteristic,
    Strict,
}

impl GeneratrixFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratrixFilter::Isotropic => "isotropic",
            GeneratrixFilter::Characteristic => "characteristic",
            GeneratrixFilter::Strict => "strict",
        }
    }

    pub fn accepts(self, g: &Generatrix) -> Result<bool> {
        match self {
            GeneratrixFilter::Isotropic => Ok(g.is_totally_isotropic()),
            GeneratrixFilter::Characteristic => g.is_characteristic(),
            GeneratrixFilter::Strict => g.is_strictly_characteristic(),
        }
    }
}

impl FromStr for GeneratrixFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "isotropic" => Ok(GeneratrixFilter::Isotropic),
            "characteristic" => Ok(GeneratrixFilter::Characteristic),
            "strict" => Ok(GeneratrixFilter::Strict),
            other => Err(Error::Malformed(format!("unknown filter '{other}'"))),
        }
    }
}

/// Number of `k`-dimensional subspaces of `F_q^n`, saturating.
pub fn grassmannian_size(q: u128, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let a = q.saturating_pow((n - i) as u32).saturating_sub(1);
        let b = q.saturating_pow((i + 1) as u32) - 1;
        num = match num.checked_mul(a) {
            Some(x) => x,
            None => return u128::MAX,
        };
        den *= b;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn enumerate_generatrices(v: &FiniteQuadraticSpace, m: u32, filter: GeneratrixFilter) -> Result<Vec<Generatrix>> {
    enumerate_generatrices_with(v, m, filter, DEFAULT_GRASSMANNIAN_BUDGET, true)
}

/// All `σ`-dimensional subspaces of `V ⊗ F_{p^m}` passing `filter`,
/// sorted by canonical basis.
pub fn enumerate_generatrices_with(
    v: &FiniteQuadraticSpace,
    m: u32,
    filter: GeneratrixFilter,
    budget: u128,
    parallel: bool,
) -> Result<Vec<Generatrix>> {
    let n = v.dim();
    if n % 2 == 1 {
        return Err(Error::Dimension(format!("generatrices need even dimension, got {n}")));
    }
    let sigma = n / 2;
    let field = galois_field(v.prime(), m)?;
    let size = grassmannian_size(field.size() as u128, n, sigma);
    if size > budget {
        return Err(Error::CapExceeded {
            what: "Grassmannian scan",
            cap: budget,
        });
    }
    if sigma == 0 {
        let zero = Subspace::zero(v, m)?;
        return Ok(if filter.accepts(&zero).unwrap_or(false) { vec![zero] } else { Vec::new() });
    }
    let search = Search { v, field: &field, n, sigma };
    let patterns = combinations(n, sigma);
    let seeds: Vec<(usize, Vec<Element>)> = patterns
        .iter()
        .enumerate()
        .flat_map(|(pi, pat)| search.rows_for(pat, 0, &[]).into_iter().map(move |r| (pi, r)))
        .collect();
    let run = |(pi, first): &(usize, Vec<Element>)| -> Result<Vec<Generatrix>> {
        let mut found = Vec::new();
        let mut rows = vec![first.clone()];
        search.extend(&patterns[*pi], &mut rows, &mut found);
        let mut out = Vec::new();
        for r in found {
            let g = Subspace::from_parts(v.clone(), field.clone(), &r);
            if filter.accepts(&g)? {
                out.push(g);
            }
        }
        Ok(out)
    };
    let chunks: Vec<Vec<Generatrix>> = if parallel {
        seeds.par_iter().map(run).collect::<Result<_>>()?
    } else {
        seeds.iter().map(run).collect::<Result<_>>()?
    };
    let mut all: Vec<Generatrix> = chunks.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

struct Search<'a> {
    v: &'a FiniteQuadraticSpace,
    field: &'a GaloisField,
    n: usize,
    sigma: usize,
}

impl Search<'_> {
    /// Echelon rows for position `r` of `pattern` that are isotropic and
    /// orthogonal to `previous`.
    fn rows_for(&self, pattern: &[usize], r: usize, previous: &[Vec<Element>]) -> Vec<Vec<Element>> {
        let pivot = pattern[r];
        let free: Vec<usize> = (pivot + 1..self.n).filter(|c| !pattern.contains(c)).collect();
        let q = self.field.size();
        let mut row = vec![0; self.n];
        row[pivot] = 1;
        let mut out = Vec::new();
        let mut counter = vec![0u32; free.len()];
        loop {
            for (&c, &x) in free.iter().zip(&counter) {
                row[c] = x;
            }
            if self.v.pairing(self.field, &row, &row) == 0
                && previous.iter().all(|p| self.v.pairing(self.field, p, &row) == 0)
            {
                out.push(row.clone());
            }
            // odometer, last free column fastest
            let mut i = free.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                counter[i] += 1;
                if counter[i] < q {
                    break;
                }
                counter[i] = 0;
            }
        }
    }

    fn extend(&self, pattern: &[usize], rows: &mut Vec<Vec<Element>>, out: &mut Vec<Vec<Vec<Element>>>) {
        if rows.len() == self.sigma {
            out.push(rows.clone());
            return;
        }
        for r in self.rows_for(pattern, rows.len(), rows) {
            rows.push(r);
            self.extend(pattern, rows, out);
            rows.pop();
        }
    }
}

use crate::error::{Error, Result};

use super::field::{galois_field, is_odd_prime, Element, GaloisField};

/// A symmetric bilinear form on `F_p^dim`. Entries are stored reduced
/// into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteQuadraticSpace {
    p: u32,
    gram: Vec<Vec<u32>>,
}

/// A square matrix over `F_p`, `m[i][j]` being coordinate `i` of the image
/// of basis vector `j`.
pub type PrimeMatrix = Vec<Vec<u32>>;

impl FiniteQuadraticSpace {
    pub fn new(p: u32, gram: &[Vec<i64>]) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime")));
        }
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("Gram matrix over F_p is not square".into()));
        }
        let reduced: Vec<Vec<u32>> = gram
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect())
            .collect();
        for i in 0..n {
            for j in 0..i {
                if reduced[i][j] != reduced[j][i] {
                    return Err(Error::Malformed("Gram matrix over F_p is not symmetric".into()));
                }
            }
        }
        Ok(FiniteQuadraticSpace { p, gram: reduced })
    }

    pub fn diagonal(p: u32, entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect();
        Self::new(p, &rows)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<u32>] {
        &self.gram
    }

    pub fn prime_field(&self) -> std::sync::Arc<GaloisField> {
        galois_field(self.p, 1).expect("validated prime")
    }

    /// `⟨x, y⟩` for vectors over `F_{p^m}`.
    pub fn pairing(&self, field: &GaloisField, x: &[Element], y: &[Element]) -> Element {
        let mut acc = 0;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 && yj != 0 {
                    acc = field.add(acc, field.mul(g, field.mul(xi, yj)));
                }
            }
        }
        acc
    }

    pub fn determinant(&self) -> u32 {
        det_mod_p(&self.gram, self.p)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.determinant() != 0
    }

    /// Whether a totally isotropic subspace of half the dimension exists,
    /// by the discriminant criterion: `(-1)^σ det` is a square.
    pub fn is_neutral(&self) -> Result<bool> {
        let n = self.dim();
        if n % 2 == 1 {
            return Err(Error::Dimension(format!("neutrality needs even dimension, got {n}")));
        }
        if !self.is_nondegenerate() {
            return Err(Error::Precondition("form is degenerate".into()));
        }
        let sigma = n / 2;
        let d = self.determinant();
        let signed = if sigma % 2 == 0 { d } else { (self.p - d) % self.p };
        let neutral = legendre_is_square(signed, self.p);
        debug_assert!(n > 4 || neutral == self.has_isotropic_half_exhaustive());
        Ok(neutral)
    }

    /// Brute force over all `F_p`-subspaces of half the dimension, built
    /// one isotropic vector at a time.
    pub fn has_isotropic_half_exhaustive(&self) -> bool {
        let half = self.dim() / 2;
        let field = self.prime_field();
        let vectors: Vec<Vec<u32>> = all_vectors(self.p, self.dim())
            .filter(|v| v.iter().any(|&x| x != 0) && self.pairing(&field, v, v) == 0)
            .collect();
        fn extend(space: &FiniteQuadraticSpace, field: &GaloisField, vs: &[Vec<u32>], chosen: &mut Vec<usize>, start: usize, half: usize) -> bool {
            if chosen.len() == half {
                return true;
            }
            for i in start..vs.len() {
                if chosen.iter().all(|&c| space.pairing(field, &vs[c], &vs[i]) == 0) {
                    let mut rows: Vec<Vec<u32>> = chosen.iter().map(|&c| vs[c].clone()).collect();
                    rows.push(vs[i].clone());
                    if rank_mod_p(&rows, space.p) == rows.len() {
                        chosen.push(i);
                        if extend(space, field, vs, chosen, i + 1, half) {
                            return true;
                        }
                        chosen.pop();
                    }
                }
            }
            false
        }
        extend(self, &field, &vectors, &mut Vec::new(), 0, half)
    }

    /// Checks `Mᵀ G M = G` over `F_p`.
    pub fn preserves_form(&self, m: &PrimeMatrix) -> bool {
        let n = self.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return false;
        }
        let p = self.p as u64;
        for a in 0..n {
            for b in 0..n {
                let mut s = 0u64;
                for i in 0..n {
                    for j in 0..n {
                        s += m[i][a] as u64 * self.gram[i][j] as u64 % p * m[j][b] as u64;
                        s %= p;
                    }
                }
                if s as u32 != self.gram[a][b] {
                    return false;
                }
            }
        }
        true
    }

    /// All `F_p`-isometries of the form, by backtracking over the images of
    /// the basis vectors. These are exactly the isometries of the extended
    /// space that commute with Frobenius.
    pub fn rational_isometries(&self, cap: usize) -> Result<Vec<PrimeMatrix>> {
        let n = self.dim();
        let field = self.prime_field();
        let vectors: Vec<Vec<u32>> = all_vectors(self.p, n).collect();
        let by_norm: Vec<Vec<&Vec<u32>>> = (0..n)
            .map(|i| vectors.iter().filter(|v| self.pairing(&field, v, v) == self.gram[i][i]).collect())
            .collect();
        let mut out = Vec::new();
        let mut cols: Vec<&Vec<u32>> = Vec::new();
        fn go<'a>(
            s: &FiniteQuadraticSpace,
            f: &GaloisField,
            by_norm: &[Vec<&'a Vec<u32>>],
            cols: &mut Vec<&'a Vec<u32>>,
            out: &mut Vec<PrimeMatrix>,
            cap: usize,
        ) -> Result<()> {
            let k = cols.len();
            let n = s.dim();
            if k == n {
                let owned: Vec<Vec<u32>> = cols.iter().map(|c| (*c).clone()).collect();
                if rank_mod_p(&owned, s.p) < n {
                    return Ok(());
                }
                if out.len() >= cap {
                    return Err(Error::CapExceeded { what: "finite isometry", cap: cap as u128 });
                }
                out.push((0..n).map(|i| (0..n).map(|j| owned[j][i]).collect()).collect());
                return Ok(());
            }
            for &v in &by_norm[k] {
                if (0..k).all(|j| s.pairing(f, cols[j], v) == s.gram[j][k]) {
                    cols.push(v);
                    go(s, f, by_norm, cols, out, cap)?;
                    cols.pop();
                }
            }
            Ok(())
        }
        go(self, &field, &by_norm, &mut cols, &mut out, cap)?;
        out.sort();
        Ok(out)
    }
}

pub(crate) fn all_vectors(p: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(n as u32);
    (0..total).map(move |mut k| {
        (0..n)
            .map(|_| {
                let d = (k % p as u64) as u32;
                k /= p as u64;
                d
            })
            .collect()
    })
}

fn legendre_is_square(a: u32, p: u32) -> bool {
    if a == 0 {
        return true;
    }
    let (mut base, mut e, mut acc) = (a as u64, (p as u64 - 1) / 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc == 1
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

pub(crate) fn det_mod_p(m: &[Vec<u32>], p: u32) -> u32 {
    let n = m.len();
    let p = p as u64;
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| a[i][k] != 0) else {
            return 0;
        };
        if piv != k {
            a.swap(piv, k);
            det = (p - det) % p;
        }
        det = det * a[k][k] % p;
        let inv = inv_mod(a[k][k], p);
        for i in k + 1..n {
            let f = a[i][k] * inv % p;
            if f == 0 {
                continue;
            }
            for j in k..n {
                a[i][j] = (a[i][j] + p * p - f * a[k][j]) % p;
            }
        }
    }
    det as u32
}

pub(crate) fn rank_mod_p(rows: &[Vec<u32>], p: u32) -> usize {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
    let p = p as u64;
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = inv_mod(a[rank][c], p);
        for i in 0..a.len() {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in c..cols {
                    a[i][j] = (a[i][j] + p * p - f * a[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: u32, g: &[&[i64]]) -> FiniteQuadraticSpace {
        FiniteQuadraticSpace::new(p, &g.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn nondegeneracy() {
        assert!(FiniteQuadraticSpace::diagonal(3, &[1, 1]).unwrap().is_nondegenerate());
        assert!(!FiniteQuadraticSpace::diagonal(3, &[1, 0]).unwrap().is_nondegenerate());
        assert!(space(5, &[&[0, 1], &[1, 0]]).is_nondegenerate());
    }

    #[test]
    fn neutrality() {
        assert!(space(3, &[&[0, 1], &[1, 0]]).is_neutral().unwrap());
        assert!(!FiniteQuadraticSpace::diagonal(3, &[1, 1]).unwrap().is_neutral().unwrap());
        assert!(FiniteQuadraticSpace::diagonal(5, &[1, 1]).unwrap().is_neutral().unwrap());
        assert!(FiniteQuadraticSpace::diagonal(3, &[1, 1, 1]).unwrap().is_neutral().is_err());
        assert!(FiniteQuadraticSpace::diagonal(3, &[1, 0]).unwrap().is_neutral().is_err());
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(FiniteQuadraticSpace::new(3, &[vec![1, 2], vec![1, 1]]).is_err());
        assert!(FiniteQuadraticSpace::new(4, &[vec![1]]).is_err());
    }

    #[test]
    fn rational_isometry_orders() {
        // O(2,3) of the anisotropic plane is dihedral of order 2(q+1)
        let v = FiniteQuadraticSpace::diagonal(3, &[1, 1]).unwrap();
        assert_eq!(v.rational_isometries(100).unwrap().len(), 8);
        // split plane: order 2(q-1)
        let h = space(5, &[&[0, 1], &[1, 0]]);
        assert_eq!(h.rational_isometries(100).unwrap().len(), 8);
        for m in h.rational_isometries(100).unwrap() {
            assert!(h.preserves_form(&m));
        }
    }

    #[test]
    fn determinant_mod_p() {
        assert_eq!(det_mod_p(&[vec![1, 2], vec![2, 1]], 5), 2);
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], 5), 1);
    }
}

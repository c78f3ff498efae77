use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

use super::field::{galois_field, Element, GaloisField};
use super::space::{FiniteQuadraticSpace, PrimeMatrix};

/// A subspace of `V ⊗ F_{p^m}`, stored as its reduced row echelon basis:
/// leading entries 1, zero above and below each pivot, rows ordered by
/// pivot column. Two subspaces are equal exactly when these matrices are.
#[derive(Clone)]
pub struct Subspace {
    ambient: FiniteQuadraticSpace,
    field: Arc<GaloisField>,
    rows: Vec<Vec<Element>>,
}

/// A subspace of half the ambient dimension. The type is shared with
/// [`Subspace`]; predicates that need the half-dimension condition check
/// it and fail with [`Error::Dimension`] otherwise.
pub type Generatrix = Subspace;

/// Reduced row echelon form over `field`, zero rows dropped.
pub fn rref(field: &GaloisField, rows: &[Vec<Element>]) -> Vec<Vec<Element>> {
    let mut a: Vec<Vec<Element>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = field.inv(a[rank][c]).expect("nonzero pivot");
        for x in a[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = a[rank].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = field.sub(*x, field.mul(f, y));
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    a.truncate(rank);
    a
}

fn pivot_columns(rows: &[Vec<Element>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|&x| x != 0).expect("nonzero row")).collect()
}

/// Basis of `{x : r·x = 0 for every row r}` for rows in reduced echelon form.
fn null_space(field: &GaloisField, rows: &[Vec<Element>], n: usize) -> Vec<Vec<Element>> {
    let pivots = pivot_columns(rows);
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; n];
            v[free] = 1;
            for (r, &pc) in rows.iter().zip(&pivots) {
                v[pc] = field.neg(r[free]);
            }
            v
        })
        .collect()
}

impl Subspace {
    /// Canonicalizes the span of `rows` over `F_{p^m}`.
    pub fn new(ambient: &FiniteQuadraticSpace, m: u32, rows: &[Vec<Element>]) -> Result<Self> {
        let field = galois_field(ambient.prime(), m)?;
        for r in rows {
            if r.len() != ambient.dim() {
                return Err(Error::Dimension(format!(
                    "vector of length {} in a space of dimension {}",
                    r.len(),
                    ambient.dim()
                )));
            }
            if r.iter().any(|&x| x >= field.size()) {
                return Err(Error::Malformed(format!("entry outside GF({}^{m})", ambient.prime())));
            }
        }
        Ok(Self::from_parts(ambient.clone(), field, rows))
    }

    pub(crate) fn from_parts(ambient: FiniteQuadraticSpace, field: Arc<GaloisField>, rows: &[Vec<Element>]) -> Self {
        let rows = rref(&field, rows);
        Subspace { ambient, field, rows }
    }

    pub fn zero(ambient: &FiniteQuadraticSpace, m: u32) -> Result<Self> {
        Self::new(ambient, m, &[])
    }

    pub fn whole(ambient: &FiniteQuadraticSpace, m: u32) -> Result<Self> {
        let n = ambient.dim();
        let rows: Vec<Vec<Element>> = (0..n).map(|i| (0..n).map(|j| (i == j) as Element).collect()).collect();
        Self::new(ambient, m, &rows)
    }

    pub fn ambient(&self) -> &FiniteQuadraticSpace {
        &self.ambient
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn degree(&self) -> u32 {
        self.field.degree()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Element>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        pivot_columns(&self.rows)
    }

    fn same_setting(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient || self.field.degree() != other.field.degree() {
            return Err(Error::Dimension("subspaces live in different spaces".into()));
        }
        Ok(())
    }

    fn with_rows(&self, rows: &[Vec<Element>]) -> Subspace {
        Self::from_parts(self.ambient.clone(), self.field.clone(), rows)
    }

    pub fn contains(&self, v: &[Element]) -> bool {
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        rref(&self.field, &rows).len() == self.rank()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.same_setting(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(self.with_rows(&rows))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.same_setting(other)?;
        let n = self.ambient.dim();
        let mut ann = null_space(&self.field, &self.rows, n);
        ann.extend(null_space(&self.field, &other.rows, n));
        let ann = rref(&self.field, &ann);
        Ok(self.with_rows(&null_space(&self.field, &ann, n)))
    }

    /// `φ(S)`: the `p`-th power applied to every coordinate.
    pub fn frobenius_image(&self) -> Subspace {
        self.frobenius_power(1)
    }

    /// `φ^k(S)`; `k` is taken modulo the degree, since `φ^m` is the identity.
    pub fn frobenius_power(&self, k: u32) -> Subspace {
        let rows: Vec<Vec<Element>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| self.field.frobenius_pow(x, k)).collect())
            .collect();
        self.with_rows(&rows)
    }

    /// Image under an `F_p`-linear map of the ambient space, extended to
    /// `F_{p^m}` coefficientwise.
    pub fn apply(&self, map: &PrimeMatrix) -> Result<Subspace> {
        let n = self.ambient.dim();
        if map.len() != n || map.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("map is not {n}x{n}")));
        }
        let f = &self.field;
        let rows: Vec<Vec<Element>> = self
            .rows
            .iter()
            .map(|v| {
                (0..n)
                    .map(|i| (0..n).fold(0, |acc, j| f.add(acc, f.mul(map[i][j], v[j]))))
                    .collect()
            })
            .collect();
        let image = self.with_rows(&rows);
        if image.rank() != self.rank() {
            return Err(Error::NotIsometry("map is singular on the subspace".into()));
        }
        Ok(image)
    }

    pub fn is_totally_isotropic(&self) -> bool {
        let k = self.rank();
        (0..k).all(|i| (i..k).all(|j| self.ambient.pairing(&self.field, &self.rows[i], &self.rows[j]) == 0))
    }

    /// σ for a subspace of dimension σ in a space of dimension 2σ.
    pub fn half_dimension(&self) -> Result<usize> {
        let n = self.ambient.dim();
        if n % 2 == 1 || self.rank() * 2 != n {
            return Err(Error::Dimension(format!(
                "subspace of dimension {} is not half of {}",
                self.rank(),
                n
            )));
        }
        Ok(self.rank())
    }

    /// Totally isotropic, of dimension σ, with `dim(G + φG) = σ + 1`.
    pub fn is_characteristic(&self) -> Result<bool> {
        let sigma = self.half_dimension()?;
        if !self.is_totally_isotropic() {
            return Ok(false);
        }
        Ok(self.sum(&self.frobenius_image())?.rank() == sigma + 1)
    }

    /// Characteristic, and the translates `φ^i(G)` span the whole space.
    pub fn is_strictly_characteristic(&self) -> Result<bool> {
        if !self.is_characteristic()? {
            return Ok(false);
        }
        Ok(self.frobenius_span().rank() == self.ambient.dim())
    }

    /// `G + φG + φ²G + ...`, iterated until it stops growing.
    pub fn frobenius_span(&self) -> Subspace {
        let mut s = self.clone();
        loop {
            let next = s.sum(&s.frobenius_image()).expect("same setting");
            if next.rank() == s.rank() {
                return s;
            }
            s = next;
        }
    }

    /// The largest subspace defined over `F_p`: the intersection of all
    /// Frobenius translates. Its canonical basis has entries in `F_p`.
    pub fn rational_part(&self) -> Subspace {
        let mut acc = self.clone();
        for k in 1..self.degree() {
            acc = acc.intersect(&self.frobenius_power(k)).expect("same setting");
        }
        acc
    }

    /// Whether every basis entry lies in the prime field.
    pub fn is_rational(&self) -> bool {
        self.rows.iter().flatten().all(|&x| self.field.in_prime_field(x))
    }

    /// The same subspace viewed over `F_{p^k}`. Only rational subspaces can
    /// change field.
    pub fn over_degree(&self, k: u32) -> Result<Subspace> {
        if k == self.degree() {
            return Ok(self.clone());
        }
        if !self.is_rational() {
            return Err(Error::Precondition("subspace is not defined over the prime field".into()));
        }
        let field = galois_field(self.ambient.prime(), k)?;
        Ok(Self::from_parts(self.ambient.clone(), field, &self.rows))
    }

    /// `σ - dim Λ`, where `Λ` is the rational part.
    pub fn artin_invariant_of_generatrix(&self) -> Result<usize> {
        if !self.is_characteristic()? {
            return Err(Error::NotCharacteristic);
        }
        Ok(self.rank() - self.rational_part().rank())
    }

    /// Coefficient lists of every entry, lowest degree first, each of
    /// length `m`.
    pub fn coefficient_rows(&self) -> Vec<Vec<Vec<u32>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&x| self.field.coefficients(x)).collect())
            .collect()
    }

    pub fn from_coefficient_rows(ambient: &FiniteQuadraticSpace, m: u32, rows: &[Vec<Vec<u32>>]) -> Result<Self> {
        let field = galois_field(ambient.prime(), m)?;
        let rows: Vec<Vec<Element>> = rows
            .iter()
            .map(|r| r.iter().map(|c| field.from_coefficients(c)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Self::new(ambient, m, &rows)
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.field.degree() == other.field.degree() && self.ambient == other.ambient
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.field.degree().hash(state);
        self.ambient.hash(state);
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the canonical basis matrix, then on the setting.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rows
            .cmp(&other.rows)
            .then(self.field.degree().cmp(&other.field.degree()))
            .then(self.ambient.cmp(&other.ambient))
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(GF({}^{}) {:?})", self.ambient.prime(), self.degree(), self.rows)
    }
}

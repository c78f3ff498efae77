use crate::error::{Error, Result};

use super::field::Element;
use super::subspace::{rref, Generatrix};

/// The Frobenius chain of a strictly characteristic generatrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainData {
    pub sigma: usize,
    /// Spans `∩_{i<σ} φ^{-i}(G)`; first nonzero coordinate is 1.
    pub x0: Vec<Element>,
    /// `x_i = F^i(x_0)` for `i < 2σ`; a basis of the whole space.
    pub chain: Vec<Vec<Element>>,
    /// `⟨F^σ x_i, x_j⟩` for `i, j < σ`. It vanishes for `i < j` and is
    /// nonzero on the diagonal.
    pub duality: Vec<Vec<Element>>,
    /// `⟨F x_i, x_j⟩` for `i, j < σ`.
    pub shift_pairing: Vec<Vec<Element>>,
    /// Whether `shift_pairing` is nonzero exactly on the diagonal. This
    /// holds for σ = 1; for σ ≥ 2 the off-diagonal entry `⟨x_1, x_0⟩`
    /// vanishes because both vectors lie in the isotropic `G`.
    pub shift_pattern_diagonal: bool,
}

fn frobenius_vec(g: &Generatrix, v: &[Element], k: usize) -> Vec<Element> {
    v.iter().map(|&x| g.field().frobenius_pow(x, k as u32)).collect()
}

pub fn chain_vector(g: &Generatrix) -> Result<ChainData> {
    let sigma = g.half_dimension()?;
    if !g.is_strictly_characteristic()? {
        return Err(Error::NotStrict("generatrix is not strictly characteristic".into()));
    }
    let m = g.degree() as usize;
    let mut line = g.clone();
    for i in 1..sigma {
        let back = (m - i % m) % m;
        line = line.intersect(&g.frobenius_power(back as u32))?;
    }
    if line.rank() != 1 {
        return Err(Error::NotStrict(format!("Frobenius intersection has dimension {}", line.rank())));
    }
    let x0 = line.rows()[0].clone();
    let chain: Vec<Vec<Element>> = (0..2 * sigma).map(|i| frobenius_vec(g, &x0, i)).collect();
    if rref(g.field(), &chain).len() != 2 * sigma {
        return Err(Error::FieldTooSmall {
            p: g.ambient().prime(),
            m: g.degree(),
            reason: "Frobenius translates of x0 are dependent".into(),
        });
    }
    let pair = |a: &[Element], b: &[Element]| g.ambient().pairing(g.field(), a, b);
    let duality: Vec<Vec<Element>> = (0..sigma)
        .map(|i| (0..sigma).map(|j| pair(&chain[sigma + i], &chain[j])).collect())
        .collect();
    let triangular = (0..sigma).all(|i| duality[i][i] != 0 && (i + 1..sigma).all(|j| duality[i][j] == 0));
    if !triangular {
        return Err(Error::NotStrict("duality pairing is not triangular".into()));
    }
    let shift_pairing: Vec<Vec<Element>> = (0..sigma)
        .map(|i| (0..sigma).map(|j| pair(&chain[i + 1], &chain[j])).collect())
        .collect();
    let shift_pattern_diagonal =
        (0..sigma).all(|i| (0..sigma).all(|j| (shift_pairing[i][j] != 0) == (i == j)));
    Ok(ChainData {
        sigma,
        x0,
        chain,
        duality,
        shift_pairing,
        shift_pattern_diagonal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_form::{galois_field, FiniteQuadraticSpace, Subspace};

    #[test]
    fn binary_chain() {
        let f = galois_field(3, 2).unwrap();
        let t = f.generator_t();
        let v = FiniteQuadraticSpace::diagonal(3, &[1, 1]).unwrap();
        let g = Subspace::new(&v, 2, &[vec![1, f.neg(t)]]).unwrap();
        let c = chain_vector(&g).unwrap();
        assert_eq!(c.x0, vec![1, f.neg(t)]);
        assert_eq!(c.chain[1], vec![1, t]);
        assert_eq!(c.duality[0][0], 2);
        assert!(c.shift_pattern_diagonal);
    }

    #[test]
    fn rejects_non_strict() {
        let h = FiniteQuadraticSpace::new(3, &[vec![0, 1], vec![1, 0]]).unwrap();
        let g = Subspace::new(&h, 2, &[vec![1, 0]]).unwrap();
        assert!(matches!(chain_vector(&g), Err(Error::NotStrict(_))));
    }
}

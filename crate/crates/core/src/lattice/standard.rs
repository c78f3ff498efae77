//! Named lattices and a small expression language for building them.
//!
//! Grammar (whitespace is ignored, names are case-sensitive):
//!
//! ```text
//! expr  := U | A1 | A2 | D4 | E8 | Gamma
//!        | diag(int, ...)
//!        | gram(int,...; int,...; ...)
//!        | twist(expr, int)        -- nonzero int
//!        | sum(expr, expr, ...)    -- orthogonal direct sum, left to right
//! ```
//!
//! Basis conventions, fixed so that every Gram matrix is reproducible:
//!
//! * `U` is the hyperbolic plane `[[0,1],[1,0]]`.
//! * `A1`, `A2`, `D4`, `E8` are the positive definite root lattices in the
//!   basis of simple roots, i.e. their Gram matrices are Cartan matrices.
//!   `D4` numbers the central node 2. `E8` uses Bourbaki numbering: the
//!   chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
//! * `Gamma` is `sum(U, twist(E8,-1))`, the even unimodular lattice of
//!   signature (1,9).
//! * `gram(...)` is an explicit override: rows separated by `;`.

use num_bigint::BigInt;

use super::IntegerLattice;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Cartan matrix of E8 in Bourbaki numbering.
pub fn e8_gram() -> Vec<Vec<i64>> {
    let edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
    cartan(8, &edges)
}

fn cartan(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        g[a - 1][b - 1] = -1;
        g[b - 1][a - 1] = -1;
    }
    g
}

fn named(name: &str) -> Option<Vec<Vec<i64>>> {
    Some(match name {
        "U" => vec![vec![0, 1], vec![1, 0]],
        "A1" => vec![vec![2]],
        "A2" => cartan(2, &[(1, 2)]),
        "D4" => cartan(4, &[(1, 2), (2, 3), (2, 4)]),
        "E8" => e8_gram(),
        _ => return None,
    })
}

/// Parses and builds a lattice from the expression language above.
pub fn construct_standard(expr: &str) -> Result<IntegerLattice> {
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser { s: compact.as_bytes(), pos: 0 };
    let lattice = parser.expr()?;
    if parser.pos != parser.s.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(lattice.with_label(compact))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Malformed(format!("lattice expression: {what} at offset {}", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn int(&mut self) -> Result<BigInt> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse::<BigInt>().ok())
            .ok_or_else(|| self.error("expected integer"))
    }

    fn int_list(&mut self, stop: &[u8]) -> Result<Vec<BigInt>> {
        let mut out = vec![self.int()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            out.push(self.int()?);
        }
        if !self.peek().is_some_and(|c| stop.contains(&c)) {
            return Err(self.error("unexpected token in integer list"));
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<IntegerLattice> {
        let name = self.ident();
        match name.as_str() {
            "" => Err(self.error("expected lattice name")),
            "diag" => {
                self.expect(b'(')?;
                let entries = self.int_list(b")")?;
                self.expect(b')')?;
                IntegerLattice::new(IntMatrix::diagonal(&entries))
            }
            "gram" => {
                self.expect(b'(')?;
                let mut rows = vec![self.int_list(b";)")?];
                while self.peek() == Some(b';') {
                    self.pos += 1;
                    rows.push(self.int_list(b";)")?);
                }
                self.expect(b')')?;
                IntegerLattice::new(IntMatrix::from_rows(&rows)?)
            }
            "twist" => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b',')?;
                let n = self.int()?;
                self.expect(b')')?;
                if n == BigInt::from(0) {
                    return Err(Error::Malformed("twist by 0".into()));
                }
                IntegerLattice::new(inner.gram().scaled(&n))
            }
            "sum" => {
                self.expect(b'(')?;
                let mut acc = self.expr()?;
                let mut parts = 1;
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    acc = acc.direct_sum(&self.expr()?);
                    parts += 1;
                }
                self.expect(b')')?;
                if parts < 2 {
                    return Err(self.error("sum needs at least two summands"));
                }
                Ok(acc)
            }
            "Gamma" => {
                let e8 = IntegerLattice::from_rows(&e8_gram())?.twist(-1)?;
                Ok(IntegerLattice::from_rows(&named("U").expect("U"))?.direct_sum(&e8))
            }
            other => match named(other) {
                Some(rows) => IntegerLattice::from_rows(&rows),
                None => Err(self.error(&format!("unknown lattice '{other}'"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::discriminant;

    fn gram(expr: &str) -> Vec<Vec<BigInt>> {
        construct_standard(expr).unwrap().gram().to_rows()
    }

    fn rows(r: &[&[i64]]) -> Vec<Vec<BigInt>> {
        r.iter().map(|x| x.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn hyperbolic_plane_and_twist() {
        assert_eq!(gram("U"), rows(&[&[0, 1], &[1, 0]]));
        assert_eq!(gram("twist(U,2)"), rows(&[&[0, 2], &[2, 0]]));
        assert_eq!(gram("twist(A2, -1)"), rows(&[&[-2, 1], &[1, -2]]));
    }

    #[test]
    fn gamma_has_rank_ten_and_unit_discriminant() {
        let g = construct_standard("sum(U, twist(E8,-1))").unwrap();
        assert_eq!(g.rank(), 10);
        assert_eq!(discriminant(&g), BigInt::from(-1));
        assert!(construct_standard("Gamma").unwrap().same_form(&g));
    }

    #[test]
    fn root_lattice_discriminants() {
        assert_eq!(discriminant(&construct_standard("E8").unwrap()), BigInt::from(1));
        assert_eq!(discriminant(&construct_standard("D4").unwrap()), BigInt::from(4));
        assert_eq!(discriminant(&construct_standard("A2").unwrap()), BigInt::from(3));
    }

    #[test]
    fn explicit_gram_override() {
        assert_eq!(gram("gram(0,1;1,0)"), gram("U"));
        assert_eq!(gram("sum(diag(-4), A1, A1)").len(), 3);
    }

    #[test]
    fn malformed_expressions() {
        for bad in ["", "twist(U,0)", "twist(U)", "sum(U)", "E9", "diag()", "diag(1,0)", "U U", "gram(1,2;3)"] {
            assert!(construct_standard(bad).is_err(), "{bad} should fail");
        }
    }
}

//! Arithmetic in `F_{p^m}` by exp/log tables.
//!
//! An element is the residue polynomial `c_0 + c_1 t + ... + c_{m-1} t^{m-1}`
//! encoded as the integer `Σ c_i p^i`. The natural order on encodings is the
//! total order used for canonical forms: it compares `c_{m-1}` first and
//! `c_0` last.
//!
//! The modulus for `(p, m)` is the first monic irreducible polynomial of
//! degree `m` when monic polynomials are ordered by their coefficient
//! vectors `(c_{m-1}, ..., c_0)` ascending. The table below lists these
//! for the small primes; other pairs are found by the same search.
//!
//! ```text
//!  p   m=1     m=2        m=3          m=4
//!  3   t       t²+1       t³+2t+1      t⁴+t+2
//!  5   t       t²+2       t³+t+1       t⁴+2
//!  7   t       t²+1       t³+2         t⁴+t+1
//! 11   t       t²+1       t³+t+4       t⁴+t+2
//! 13   t       t²+2       t³+2         t⁴+2
//! ```
//!
//! The exp/log tables use the smallest primitive element, which need not
//! be `t`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub type Element = u32;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u32 = 1 << 20;

/// Moduli as coefficient lists, lowest degree first.
const MODULI: &[(u32, u32, &[u32])] = &[
    (3, 1, &[0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 1, 0, 0, 1]),
    (5, 1, &[0, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[1, 1, 0, 1]),
    (5, 4, &[2, 0, 0, 0, 1]),
    (7, 1, &[0, 1]),
    (7, 2, &[1, 0, 1]),
    (7, 3, &[2, 0, 0, 1]),
    (7, 4, &[1, 1, 0, 0, 1]),
    (11, 1, &[0, 1]),
    (11, 2, &[1, 0, 1]),
    (11, 3, &[4, 1, 0, 1]),
    (11, 4, &[2, 1, 0, 0, 1]),
    (13, 1, &[0, 1]),
    (13, 2, &[2, 0, 1]),
    (13, 3, &[2, 0, 0, 1]),
    (13, 4, &[2, 0, 0, 0, 1]),
];

pub(crate) fn is_odd_prime(p: u32) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

pub struct GaloisField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<Element>,
    log: Vec<u32>,
    frob: Vec<Element>,
    neg: Vec<Element>,
    add: Option<Vec<Element>>,
}

impl std::fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}

impl Eq for GaloisField {}

/// The cached field `F_{p^m}`.
pub fn galois_field(p: u32, m: u32) -> Result<Arc<GaloisField>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<GaloisField>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().expect("field cache").get(&(p, m)) {
        return Ok(f.clone());
    }
    let field = Arc::new(GaloisField::build(p, m)?);
    Ok(cache.lock().expect("field cache").entry((p, m)).or_insert(field).clone())
}

// Polynomials over F_p as coefficient vectors, lowest degree first.

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = (*r.last().unwrap() as u64 * lead_inv as u64 % p as u64) as u32;
        for (i, &bi) in b.iter().enumerate() {
            let t = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    poly_trim(out.into_iter().map(|x| x as u32).collect())
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let (mut base, mut acc) = (a as u64 % p as u64, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Digits of `n` in base `p`, `len` of them.
fn digits(mut n: u32, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = n % p;
            n /= p;
            d
        })
        .collect()
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        // every monic polynomial of degree d
        for low in 0..p.pow(d as u32) {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible of degree `m` in the documented order.
pub fn search_modulus(p: u32, m: u32) -> Vec<u32> {
    let m = m as usize;
    // (c_{m-1},...,c_0) ascending is the base-p counter whose most
    // significant digit is c_{m-1}: exactly the encoding order.
    (0..p.pow(m as u32))
        .map(|n| {
            let mut f = digits(n, p, m);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn modulus_for(p: u32, m: u32) -> Vec<u32> {
    MODULI
        .iter()
        .find(|(pp, mm, _)| *pp == p && *mm == m)
        .map(|(_, _, f)| f.to_vec())
        .unwrap_or_else(|| search_modulus(p, m))
}

impl GaloisField {
    fn build(p: u32, m: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime")));
        }
        if m == 0 {
            return Err(Error::Precondition("extension degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_FIELD_SIZE as u64).ok_or(Error::CapExceeded {
            what: "field size",
            cap: MAX_FIELD_SIZE as u128,
        })? as u32;
        let modulus = modulus_for(p, m);
        let md = m as usize;
        let encode = |poly: &[u32]| poly.iter().rev().fold(0u32, |acc, &c| acc * p + c);
        let decode = |x: u32| poly_trim(digits(x, p, md));

        // primitive element: smallest encoding whose powers cover the group
        let order = q - 1;
        let prime_factors: Vec<u32> = {
            let (mut n, mut fs, mut d) = (order, Vec::new(), 2);
            while d * d <= n {
                if n % d == 0 {
                    fs.push(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                fs.push(n);
            }
            fs
        };
        let pow_poly = |g: &[u32], mut e: u32| {
            let (mut base, mut acc) = (g.to_vec(), vec![1u32]);
            while e > 0 {
                if e & 1 == 1 {
                    acc = poly_rem(&poly_mul(&acc, &base, p), &modulus, p);
                }
                base = poly_rem(&poly_mul(&base, &base, p), &modulus, p);
                e >>= 1;
            }
            acc
        };
        let generator = (1..q)
            .map(decode)
            .find(|g| prime_factors.iter().all(|&f| pow_poly(g, order / f) != vec![1]))
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        for i in 0..order {
            let e = encode(&cur);
            exp[i as usize] = e;
            log[e as usize] = i;
            cur = poly_rem(&poly_mul(&cur, &generator, p), &modulus, p);
        }
        for i in order..2 * order {
            exp[i as usize] = exp[(i - order) as usize];
        }
        let digit_neg = |x: u32| encode(&digits(x, p, md).iter().map(|&d| (p - d) % p).collect::<Vec<_>>());
        let neg = (0..q).map(digit_neg).collect();
        let mut field = GaloisField {
            p,
            m,
            q,
            modulus,
            exp,
            log,
            frob: Vec::new(),
            neg,
            add: None,
        };
        field.frob = (0..q).map(|x| field.pow(x, p as u64)).collect();
        if q <= 256 {
            let table = (0..q * q).map(|i| field.add_digits(i / q, i % q)).collect();
            field.add = Some(table);
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    /// Coefficients of the modulus, lowest degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn add_digits(&self, a: Element, b: Element) -> Element {
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None if self.m == 1 => (a + b) % self.p,
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Element) -> Option<Element> {
        if a == 0 {
            None
        } else {
            let order = self.q - 1;
            Some(self.exp[((order - self.log[a as usize]) % order) as usize])
        }
    }

    pub fn pow(&self, a: Element, e: u64) -> Element {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    /// `x ↦ x^p`.
    #[inline]
    pub fn frobenius(&self, a: Element) -> Element {
        self.frob[a as usize]
    }

    pub fn frobenius_pow(&self, a: Element, k: u32) -> Element {
        (0..k % self.m).fold(a, |x, _| self.frobenius(x))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Element {
        n.rem_euclid(self.p as i64) as Element
    }

    pub fn in_prime_field(&self, a: Element) -> bool {
        a < self.p
    }

    /// Residue-polynomial coefficients, lowest degree first, length `m`.
    pub fn coefficients(&self, a: Element) -> Vec<u32> {
        digits(a, self.p, self.m as usize)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<Element> {
        if coeffs.len() > self.m as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Malformed(format!(
                "coefficient list {coeffs:?} is not an element of GF({}^{})",
                self.p, self.m
            )));
        }
        Ok(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }

    pub fn is_square(&self, a: Element) -> bool {
        a == 0 || self.log[a as usize] % 2 == 0
    }

    /// Element `t` (the class of the polynomial variable); for `m = 1` it is 0.
    pub fn generator_t(&self) -> Element {
        if self.m == 1 {
            0
        } else {
            self.p
        }
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_moduli_match_the_search_rule() {
        for &(p, m, f) in MODULI {
            assert_eq!(search_modulus(p, m), f, "p={p} m={m}");
        }
    }

    #[test]
    fn field_axioms_small() {
        for (p, m) in [(3, 1), (3, 2), (5, 2), (3, 3), (7, 2)] {
            let f = galois_field(p, m).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                assert_eq!(f.frobenius_pow(a, m), a);
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
    }

    #[test]
    fn nine_elements() {
        let f = galois_field(3, 2).unwrap();
        let t = f.generator_t();
        assert_eq!(f.mul(t, t), f.from_int(-1));
        assert_eq!(f.frobenius(t), f.neg(t));
        assert_eq!(f.coefficients(t), vec![0, 1]);
        assert_eq!(f.from_coefficients(&[2, 1]).unwrap(), 5);
        assert!(f.from_coefficients(&[3]).is_err());
    }

    #[test]
    fn bad_parameters() {
        assert!(galois_field(2, 1).is_err());
        assert!(galois_field(9, 1).is_err());
        assert!(galois_field(3, 0).is_err());
        assert!(matches!(galois_field(3, 30), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn large_field_uses_digit_addition() {
        let f = galois_field(3, 6).unwrap();
        let t = f.generator_t();
        let x = f.add(f.pow(t, 5), 2);
        assert_eq!(f.sub(x, 2), f.pow(t, 5));
        assert_eq!(f.frobenius_pow(x, 6), x);
    }
}

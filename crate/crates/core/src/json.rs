//! Canonical JSON encodings.
//!
//! Objects are `serde_json::Value` maps, which keep keys sorted, and are
//! written without insignificant whitespace, so equal values always give
//! equal bytes. Integers are written as plain decimal numbers of any size.

use num_bigint::BigInt;
use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::finite_form::{FiniteQuadraticSpace, Generatrix, Subspace};
use crate::lattice::{IntegerLattice, LatticeEmbedding};
use crate::matrix::IntMatrix;

pub fn canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialize")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn big(x: &BigInt) -> Value {
    Value::Number(x.to_string().parse::<Number>().expect("decimal integer"))
}

fn malformed(path: &str, what: &str) -> Error {
    Error::Malformed(format!("{path}: {what}"))
}

pub fn parse_big(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_str()
            .parse::<BigInt>()
            .map_err(|_| malformed(path, "expected an integer")),
        _ => Err(malformed(path, "expected an integer")),
    }
}

pub fn parse_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| malformed(path, "expected a non-negative integer"))
}

pub fn field<'a>(obj: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    obj.as_object()
        .ok_or_else(|| malformed(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| malformed(path, &format!("missing key '{key}'")))
}

pub fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(path, "expected an array"))
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(big).collect()))
            .collect(),
    )
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big).collect())
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<Vec<BigInt>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_big(x, &format!("{path}[{i}]")))
        .collect()
}

/// A `rows × cols` integer matrix given as a list of rows.
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize, path: &str) -> Result<IntMatrix> {
    let list = array(v, path)?;
    if list.len() != rows {
        return Err(malformed(path, &format!("expected {rows} rows, found {}", list.len())));
    }
    let data: Vec<Vec<BigInt>> = list
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    if data.iter().any(|r| r.len() != cols) {
        return Err(malformed(path, &format!("expected rows of length {cols}")));
    }
    IntMatrix::from_rows_shaped(data, cols)
}

pub fn lattice_to_json(l: &IntegerLattice) -> Value {
    let mut m = Map::new();
    if let Some(label) = l.label() {
        m.insert("label".into(), Value::String(label.into()));
    }
    m.insert("rank".into(), json!(l.rank()));
    m.insert("gram".into(), matrix_to_json(l.gram()));
    Value::Object(m)
}

pub fn lattice_from_json(v: &Value, path: &str) -> Result<IntegerLattice> {
    let rank = parse_u64(field(v, "rank", path)?, &format!("{path}.rank"))? as usize;
    let gram = matrix_from_json(field(v, "gram", path)?, rank, rank, &format!("{path}.gram"))?;
    let lattice = if rank == 0 {
        IntegerLattice::zero()
    } else {
        IntegerLattice::new(gram).map_err(|e| malformed(path, &e.to_string()))?
    };
    Ok(match v.get("label") {
        None | Some(Value::Null) => lattice,
        Some(Value::String(s)) => lattice.with_label(s.clone()),
        Some(_) => return Err(malformed(&format!("{path}.label"), "expected a string")),
    })
}

pub fn embedding_to_json(e: &LatticeEmbedding) -> Value {
    json!({
        "source": lattice_to_json(e.source()),
        "target": lattice_to_json(e.target()),
        "matrix": matrix_to_json(e.matrix()),
    })
}

pub fn embedding_from_json(v: &Value, path: &str) -> Result<LatticeEmbedding> {
    let source = lattice_from_json(field(v, "source", path)?, &format!("{path}.source"))?;
    let target = lattice_from_json(field(v, "target", path)?, &format!("{path}.target"))?;
    let matrix = matrix_from_json(
        field(v, "matrix", path)?,
        target.rank(),
        source.rank(),
        &format!("{path}.matrix"),
    )?;
    LatticeEmbedding::new(source, target, matrix).map_err(|e| malformed(path, &e.to_string()))
}

pub fn space_to_json(s: &FiniteQuadraticSpace) -> Value {
    json!({ "p": s.prime(), "dim": s.dim(), "gram": s.gram() })
}

fn small_matrix(v: &Value, path: &str) -> Result<Vec<Vec<i64>>> {
    array(v, path)?
        .iter()
        .map(|r| {
            array(r, path)?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| malformed(path, "expected a small integer")))
                .collect()
        })
        .collect()
}

pub fn space_from_json(v: &Value, path: &str) -> Result<FiniteQuadraticSpace> {
    let p = parse_u64(field(v, "p", path)?, &format!("{path}.p"))? as u32;
    let gram = small_matrix(field(v, "gram", path)?, &format!("{path}.gram"))?;
    if let Some(d) = v.get("dim") {
        if parse_u64(d, &format!("{path}.dim"))? as usize != gram.len() {
            return Err(malformed(path, "dim does not match the Gram matrix"));
        }
    }
    FiniteQuadraticSpace::new(p, &gram).map_err(|e| malformed(path, &e.to_string()))
}

/// `{"p", "m", "dim", "gram", "basis"}` with each basis entry written as
/// its full list of `m` residue-polynomial coefficients.
pub fn generatrix_to_json(g: &Generatrix) -> Value {
    json!({
        "p": g.ambient().prime(),
        "m": g.degree(),
        "dim": g.ambient().dim(),
        "gram": g.ambient().gram(),
        "basis": g.coefficient_rows(),
    })
}

pub fn generatrix_from_json(v: &Value, path: &str) -> Result<Generatrix> {
    let ambient = space_from_json(v, path)?;
    let m = parse_u64(field(v, "m", path)?, &format!("{path}.m"))? as u32;
    let basis_path = format!("{path}.basis");
    let rows: Vec<Vec<Vec<u32>>> = array(field(v, "basis", path)?, &basis_path)?
        .iter()
        .map(|r| {
            array(r, &basis_path)?
                .iter()
                .map(|e| {
                    array(e, &basis_path)?
                        .iter()
                        .map(|c| {
                            c.as_u64()
                                .map(|x| x as u32)
                                .ok_or_else(|| malformed(&basis_path, "expected a coefficient"))
                        })
                        .collect()
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Subspace::from_coefficient_rows(&ambient, m, &rows).map_err(|e| malformed(path, &e.to_string()))
}

pub fn context_id(n: &IntegerLattice, p: u32, gamma: &LatticeEmbedding) -> String {
    let v = json!({
        "ambient": matrix_to_json(n.gram()),
        "p": p,
        "source": matrix_to_json(gamma.source().gram()),
        "gamma": matrix_to_json(gamma.matrix()),
    });
    sha256_hex(canonical_string(&v).as_bytes())
}

pub fn digest_matrices(ms: &[IntMatrix]) -> String {
    let v = Value::Array(ms.iter().map(matrix_to_json).collect());
    sha256_hex(canonical_string(&v).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::construct_standard;

    #[test]
    fn lattice_roundtrip_is_byte_stable() {
        let l = construct_standard("sum(U,twist(E8,-1))").unwrap();
        let s = canonical_string(&lattice_to_json(&l));
        assert!(s.starts_with("{\"gram\":[[0,1,"));
        let back = lattice_from_json(&serde_json::from_str(&s).unwrap(), "x").unwrap();
        assert_eq!(back, l);
        assert_eq!(canonical_string(&lattice_to_json(&back)), s);
    }

    #[test]
    fn huge_integers_survive() {
        let x: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = canonical_string(&big(&x));
        assert_eq!(s, "123456789012345678901234567890");
        assert_eq!(parse_big(&serde_json::from_str(&s).unwrap(), "x").unwrap(), x);
    }

    #[test]
    fn embedding_validation_names_the_object() {
        let bad = json!({
            "source": {"rank": 1, "gram": [[-4]]},
            "target": {"rank": 2, "gram": [[0, 1], [1, 0]]},
            "matrix": [[1], [0]],
        });
        let err = embedding_from_json(&bad, "objects.j").unwrap_err();
        assert!(err.to_string().contains("objects.j"));
    }

    #[test]
    fn generatrix_roundtrip() {
        let v = FiniteQuadraticSpace::diagonal(3, &[1, 1]).unwrap();
        let g = Subspace::new(&v, 2, &[vec![1, 3]]).unwrap();
        let j = generatrix_to_json(&g);
        assert_eq!(canonical_string(&j), r#"{"basis":[[[1,0],[0,1]]],"dim":2,"gram":[[1,0],[0,1]],"m":2,"p":3}"#);
        assert_eq!(generatrix_from_json(&j, "g").unwrap(), g);
    }
}

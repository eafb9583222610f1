//! JSON forms of scalars, elements and derived objects.
//!
//! Scalars are written as `{"rational": [p, q]}` or
//! `{"cyclotomic": [[e, p, q], ...]}` (the sum of `p/q * z^e`); integers and
//! strings such as `"-1/2 + z"` are also accepted on input.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::parse_scalar;
use crate::lattice::Degree;
use crate::scalar::{CycScalar, CyclotomicField, Rational};
use crate::simple_lie::{GElem, SimpleLieAlgebra};
use crate::structure::{RootDatum, Weight};
use crate::tau::{TauAlgebra, TauElement};

fn big_json(b: &BigInt) -> Value {
    match b.to_i64() {
        Some(v) => json!(v),
        None => json!(b.to_string()),
    }
}

fn big_from(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Serde(format!("expected an integer, got {n}"))),
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Serde(format!("expected an integer, got {s:?}"))),
        other => Err(Error::Serde(format!("expected an integer, got {other}"))),
    }
}

pub fn scalar_to_json(c: &CycScalar) -> Value {
    match c.as_rational() {
        Some(q) => json!({ "rational": [big_json(q.numer()), big_json(q.denom())] }),
        None => json!({
            "cyclotomic": c
                .coeffs()
                .iter()
                .map(|(e, q)| json!([e, big_json(q.numer()), big_json(q.denom())]))
                .collect::<Vec<_>>()
        }),
    }
}

pub fn scalar_from_json(v: &Value, field: CyclotomicField) -> Result<CycScalar> {
    let ratio = |p: &Value, q: &Value| -> Result<Rational> {
        let q = big_from(q)?;
        if q == BigInt::from(0) {
            return Err(Error::Serde("zero denominator".into()));
        }
        Ok(Rational::new(big_from(p)?, q))
    };
    match v {
        Value::Number(_) => Ok(field.big(big_from(v)?)),
        Value::String(s) => parse_scalar(s, field),
        Value::Object(map) if map.len() == 1 => {
            if let Some(Value::Array(pq)) = map.get("rational") {
                if let [p, q] = pq.as_slice() {
                    return Ok(field.from_rational(ratio(p, q)?));
                }
            }
            if let Some(Value::Array(terms)) = map.get("cyclotomic") {
                let mut parts = Vec::new();
                for t in terms {
                    match t.as_array().map(Vec::as_slice) {
                        Some([e, p, q]) => {
                            let e = e
                                .as_i64()
                                .ok_or_else(|| Error::Serde("exponent must be an integer".into()))?;
                            parts.push((e, ratio(p, q)?));
                        }
                        _ => return Err(Error::Serde("cyclotomic terms are [e, p, q]".into())),
                    }
                }
                return Ok(field.from_terms(parts));
            }
            Err(Error::Serde(format!("unrecognized scalar {v}")))
        }
        _ => Err(Error::Serde(format!("unrecognized scalar {v}"))),
    }
}

pub fn rational_to_json(q: &Rational) -> Value {
    if q.denom().is_one() {
        big_json(q.numer())
    } else {
        json!({ "rational": [big_json(q.numer()), big_json(q.denom())] })
    }
}

pub fn scalars_to_json(v: &[CycScalar]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

pub fn gelem_to_json(lie: &SimpleLieAlgebra, x: &GElem) -> Value {
    Value::Object(
        x.iter()
            .map(|(i, c)| (lie.labels()[i].clone(), scalar_to_json(c)))
            .collect(),
    )
}

pub fn gelem_from_json(lie: &SimpleLieAlgebra, v: &Value) -> Result<GElem> {
    let map = v
        .as_object()
        .ok_or_else(|| Error::Serde(format!("expected a {{label: scalar}} map, got {v}")))?;
    let mut out = GElem::zero();
    for (label, c) in map {
        let i = lie
            .label_index(label)
            .ok_or_else(|| Error::Serde(format!("unknown basis label {label:?}")))?;
        out.add_term(i, &scalar_from_json(c, lie.field())?);
    }
    Ok(out)
}

/// `{"loop": [...], "central": [...], "deriv": [...]}`.
pub fn element_to_json(alg: &TauAlgebra, x: &TauElement) -> Value {
    let labels = alg.lie().labels();
    let mut loops = Vec::new();
    for (r, g) in x.loops() {
        for (i, c) in g.iter() {
            loops.push(json!({ "label": labels[i], "degree": r, "coeff": scalar_to_json(c) }));
        }
    }
    let mut central = Vec::new();
    for (i, c) in x.central0().iter().enumerate() {
        if !c.is_zero() {
            central.push(json!({ "index": i + 1, "coeff": scalar_to_json(c) }));
        }
    }
    for (r, c) in x.central() {
        central.push(json!({
            "vector": alg.frame().central_vector(r),
            "degree": r,
            "coeff": scalar_to_json(c),
        }));
    }
    let mut deriv = Vec::new();
    for (i, c) in x.deriv0().iter().enumerate() {
        if !c.is_zero() {
            deriv.push(json!({ "index": i + 1, "coeff": scalar_to_json(c) }));
        }
    }
    for (r, c) in x.hamiltonians() {
        deriv.push(json!({ "degree": r, "coeff": scalar_to_json(c) }));
    }
    json!({ "loop": loops, "central": central, "deriv": deriv })
}

fn degree_from(v: &Value) -> Result<Degree> {
    Ok(serde_json::from_value(v.clone())?)
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Serde(format!("missing key {key:?}")))
}

pub fn element_from_json(alg: &TauAlgebra, v: &Value) -> Result<TauElement> {
    let field = alg.field();
    let list = |key: &str| -> Result<Vec<Value>> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(a)) => Ok(a.clone()),
            Some(other) => Err(Error::Serde(format!("{key:?} must be a list, got {other}"))),
        }
    };
    let index = |t: &Value| -> Result<usize> {
        let i = t
            .get("index")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Serde("index must be a positive integer".into()))? as usize;
        if i == 0 || i > alg.n() {
            return Err(Error::Serde(format!("index {i} out of range")));
        }
        Ok(i - 1)
    };
    let mut out = alg.zero();
    let mut loops: std::collections::BTreeMap<Degree, GElem> = Default::default();
    for t in list("loop")? {
        let label = field_of(&t, "label")?
            .as_str()
            .ok_or_else(|| Error::Serde("label must be a string".into()))?;
        let i = alg
            .lie()
            .label_index(label)
            .ok_or_else(|| Error::Serde(format!("unknown basis label {label:?}")))?;
        let c = scalar_from_json(field_of(&t, "coeff")?, field)?;
        loops
            .entry(degree_from(field_of(&t, "degree")?)?)
            .or_default()
            .add_term(i, &c);
    }
    for (r, g) in loops {
        out = out.add(&alg.loop_elem(&g, &r)?);
    }
    for t in list("central")? {
        let c = scalar_from_json(field_of(&t, "coeff")?, field)?;
        if t.get("index").is_some() {
            out = out.add(&alg.k(index(&t)?)?.scale(&c));
        } else {
            let r = degree_from(field_of(&t, "degree")?)?;
            let u = degree_from(field_of(&t, "vector")?)?;
            let scaled: Vec<CycScalar> = u.to_scalars(field).iter().map(|a| a * &c).collect();
            out = out.add(&alg.central(&scaled, &r)?);
        }
    }
    for t in list("deriv")? {
        let c = scalar_from_json(field_of(&t, "coeff")?, field)?;
        if t.get("index").is_some() {
            out = out.add(&alg.d(index(&t)?)?.scale(&c));
        } else {
            let r = degree_from(field_of(&t, "degree")?)?;
            out = out.add(&alg.hamiltonian(&r)?.scale(&c));
        }
    }
    Ok(out)
}

pub fn root_to_json(root: &RootDatum) -> Value {
    json!({
        "alpha": root.alpha.0.iter().map(rational_to_json).collect::<Vec<_>>(),
        "degree": root.degree,
        "real": root.is_real(),
    })
}

pub fn weight_to_json(w: &Weight) -> Value {
    json!({ "h": scalars_to_json(&w.h), "K": scalars_to_json(&w.k), "d": scalars_to_json(&w.d) })
}

pub fn weight_from_json(v: &Value, field: CyclotomicField, cartan_dim: usize, n: usize) -> Result<Weight> {
    let part = |key: &str, len: usize| -> Result<Vec<CycScalar>> {
        match v.get(key) {
            None => Ok(vec![field.zero(); len]),
            Some(Value::Array(a)) if a.len() == len => a.iter().map(|x| scalar_from_json(x, field)).collect(),
            Some(_) => Err(Error::Serde(format!("weight part {key:?} must have {len} entries"))),
        }
    };
    Ok(Weight {
        h: part("h", cartan_dim)?,
        k: part("K", n)?,
        d: part("d", n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip() {
        let f = CyclotomicField::new(3).unwrap();
        for c in [f.ratio(-3, 2), f.zeta_pow(1), &f.ratio(1, 3) - &f.zeta_pow(1), f.zero()] {
            assert_eq!(scalar_from_json(&scalar_to_json(&c), f).unwrap(), c);
        }
        assert_eq!(scalar_from_json(&json!(7), f).unwrap(), f.int(7));
        assert_eq!(scalar_from_json(&json!("z^3"), f).unwrap(), f.one());
        assert_eq!(scalar_to_json(&f.ratio(-1, 2)), json!({"rational": [-1, 2]}));
        assert!(scalar_from_json(&json!({"rational": [1, 0]}), f).is_err());
    }
}

//! Full-range evaluation of a multiplicative function over `[1, N]`.
//!
//! The least-prime-factor table turns evaluation into one rule lookup and
//! one multiplication per integer; rule values are memoized per
//! `(prime, exponent)` before any parallel consumer touches the result,
//! so scans are `O(N log log N)` and the produced arrays are immutable.

use crate::arith::PrimeTable;
use crate::multfun::MultFunction;
use crate::value::{Frac, RootOfUnity};
use crate::{Error, Result, Value};
use num_complex::Complex64;
use std::collections::HashMap;

/// `f(1..=n_max)` as complex floats; index 0 is unused.
pub fn complex_scan(f: &MultFunction, table: &PrimeTable, n_max: u64) -> Result<Vec<Complex64>> {
    if n_max > table.limit() {
        return Err(Error::OutOfRange(format!(
            "scan to {n_max} exceeds sieve limit {}",
            table.limit()
        )));
    }
    let n_max = n_max as usize;
    let mut vals = vec![Complex64::new(0.0, 0.0); n_max + 1];
    if n_max == 0 {
        return Ok(vals);
    }
    vals[1] = Complex64::new(1.0, 0.0);
    let mut rule: HashMap<(u64, u32), Complex64> = HashMap::new();
    for n in 2..=n_max {
        let p = table.lpf(n as u64)?;
        let mut m = n as u64;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let c = *rule
            .entry((p, k))
            .or_insert_with(|| f.prime_power_value(p, k as u64).to_complex());
        vals[n] = vals[m as usize] * c;
    }
    Ok(vals)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct ExactKey {
    mag: Frac,
    root: RootOfUnity,
}

/// A scanned value sequence supporting position equality tests: exact
/// (interned ids) when every rule value is exact, tolerance-based complex
/// otherwise.
pub enum ValueSeq {
    Exact { ids: Vec<u32>, values: Vec<Value> },
    Approx { vals: Vec<Complex64>, tol: f64 },
}

impl ValueSeq {
    /// Largest scanned position.
    pub fn n_max(&self) -> u64 {
        match self {
            ValueSeq::Exact { ids, .. } => ids.len() as u64 - 1,
            ValueSeq::Approx { vals, .. } => vals.len() as u64 - 1,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ValueSeq::Exact { .. })
    }

    /// Equality of `f(a)` and `f(b)` (exact or within tolerance).
    pub fn eq_at(&self, a: u64, b: u64) -> bool {
        match self {
            ValueSeq::Exact { ids, .. } => ids[a as usize] == ids[b as usize],
            ValueSeq::Approx { vals, tol } => {
                (vals[a as usize] - vals[b as usize]).norm() <= *tol
            }
        }
    }

    pub fn value(&self, n: u64) -> Value {
        match self {
            ValueSeq::Exact { ids, values } => values[ids[n as usize] as usize],
            ValueSeq::Approx { vals, .. } => Value::approx(vals[n as usize]),
        }
    }

    /// Compact id usable as an alphabet symbol (exact sequences only).
    pub fn id(&self, n: u64) -> Option<u32> {
        match self {
            ValueSeq::Exact { ids, .. } => Some(ids[n as usize]),
            ValueSeq::Approx { .. } => None,
        }
    }
}

/// Scans `f(1..=n_max)`, interning exact values; falls back to a complex
/// scan with the given tolerance when a float-valued rule is encountered.
pub fn value_scan(
    f: &MultFunction,
    table: &PrimeTable,
    n_max: u64,
    tol: f64,
) -> Result<ValueSeq> {
    if n_max > table.limit() {
        return Err(Error::OutOfRange(format!(
            "scan to {n_max} exceeds sieve limit {}",
            table.limit()
        )));
    }
    let n = n_max as usize;
    let mut interner: HashMap<ExactKey, u32> = HashMap::new();
    let mut values: Vec<Value> = Vec::new();
    let mut intern = |v: Value, values: &mut Vec<Value>| -> Option<u32> {
        match v {
            Value::Exact { mag, root } => {
                let key = ExactKey { mag, root };
                Some(*interner.entry(key).or_insert_with(|| {
                    values.push(v);
                    (values.len() - 1) as u32
                }))
            }
            Value::Approx(_) => None,
        }
    };

    let mut ids = vec![0u32; n + 1];
    let one = intern(Value::one(), &mut values).unwrap();
    ids[1] = one;
    if n >= 1 {
        ids[0] = one; // unused slot
    }
    let mut rule_ids: HashMap<(u64, u32), u32> = HashMap::new();
    let mut prod_memo: HashMap<(u32, u32), u32> = HashMap::new();
    for i in 2..=n {
        let p = table.lpf(i as u64)?;
        let mut m = i as u64;
        let mut k = 0u32;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let rid = match rule_ids.get(&(p, k)) {
            Some(&r) => r,
            None => {
                let v = f.prime_power_value(p, k as u64);
                match intern(v, &mut values) {
                    Some(r) => {
                        rule_ids.insert((p, k), r);
                        r
                    }
                    None => return approx_scan(f, table, n_max, tol),
                }
            }
        };
        let base = ids[m as usize];
        let id = match prod_memo.get(&(base, rid)) {
            Some(&x) => x,
            None => {
                let v = values[base as usize].mul(values[rid as usize]);
                match intern(v, &mut values) {
                    Some(x) => {
                        prod_memo.insert((base, rid), x);
                        x
                    }
                    None => return approx_scan(f, table, n_max, tol),
                }
            }
        };
        ids[i] = id;
    }
    Ok(ValueSeq::Exact { ids, values })
}

fn approx_scan(f: &MultFunction, table: &PrimeTable, n_max: u64, tol: f64) -> Result<ValueSeq> {
    Ok(ValueSeq::Approx { vals: complex_scan(f, table, n_max)?, tol })
}

/// Rule values at every prime of the table, as complex floats (for prime
/// sums over `f(p)`).
pub fn prime_values_complex(f: &MultFunction, table: &PrimeTable) -> Vec<Complex64> {
    table.primes().iter().map(|&p| f.prime_value(p as u64).to_complex()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve;
    use crate::characters::{enumerate_characters, DirichletCharacter};
    use crate::multfun::Kappa;
    use std::collections::BTreeMap;

    #[test]
    fn complex_scan_matches_pointwise() {
        let t = sieve(5000).unwrap();
        let chi = enumerate_characters(5).unwrap().pop().unwrap();
        let f = MultFunction::from_character(chi);
        let vals = complex_scan(&f, &t, 5000).unwrap();
        for n in 1..=5000u64 {
            let direct = f.evaluate_complex(n, &t).unwrap();
            assert!((vals[n as usize] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn exact_scan_interns() {
        let t = sieve(10_000).unwrap();
        let f = MultFunction::liouville();
        let seq = value_scan(&f, &t, 10_000, 1e-9).unwrap();
        assert!(seq.is_exact());
        for n in 1..=10_000u64 {
            assert_eq!(seq.value(n), f.evaluate(n, &t).unwrap());
        }
        // only +/-1 occur
        match &seq {
            ValueSeq::Exact { values, .. } => assert!(values.len() <= 3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn approx_fallback_for_float_rules() {
        let t = sieve(500).unwrap();
        let f = MultFunction::archimedean(0.5);
        let seq = value_scan(&f, &t, 500, 1e-9).unwrap();
        assert!(!seq.is_exact());
        assert!(seq.eq_at(1, 1));
    }

    #[test]
    fn eq_at_respects_structure() {
        let t = sieve(1000).unwrap();
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let f = one.modify_at_primes(BTreeMap::from([(2, Kappa::alternating())]));
        let seq = value_scan(&f, &t, 1000, 1e-9).unwrap();
        assert!(seq.eq_at(1, 3)); // both odd -> 1
        assert!(!seq.eq_at(1, 2)); // f(2) = -1
        assert!(seq.eq_at(2, 8)); // (-1)^1 vs (-1)^3
    }
}

//! Multiplicative functions given by prime-power rules, with every
//! constructor used in the analyses: Dirichlet characters modified at
//! finitely many primes, Liouville-type signs, Archimedean phases,
//! log-log phases, damped magnitudes and staged prime-interval rules.

use crate::arith::{factorize, pow_mod, PrimeTable};
use crate::characters::{char_product, DirichletCharacter};
use crate::value::{Frac, RootOfUnity};
use crate::{Error, Result, Value};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Per-prime exponent rule for modified primes.
#[derive(Clone, Debug)]
pub enum Kappa {
    /// `kappa(k) = scale * ratio^k`. With `scale = 1` this is the geometric
    /// form `xi^k` that keeps a completely multiplicative base completely
    /// multiplicative.
    Scaled { scale: Value, ratio: Value },
    /// `kappa(k) = head[k-1]` for `k <= head.len()`, then repeats `cycle`.
    EventuallyPeriodic { head: Vec<Value>, cycle: Vec<Value> },
}

impl Kappa {
    pub fn constant(v: Value) -> Self {
        Kappa::Scaled { scale: v, ratio: Value::one() }
    }

    pub fn geometric(xi: Value) -> Self {
        Kappa::Scaled { scale: Value::one(), ratio: xi }
    }

    pub fn alternating() -> Self {
        Kappa::geometric(Value::minus_one())
    }

    pub fn eval(&self, k: u64) -> Value {
        debug_assert!(k >= 1);
        match self {
            Kappa::Scaled { scale, ratio } => scale.mul(ratio.powi(k)),
            Kappa::EventuallyPeriodic { head, cycle } => {
                let k = k as usize;
                if k <= head.len() {
                    head[k - 1]
                } else {
                    cycle[(k - head.len() - 1) % cycle.len()]
                }
            }
        }
    }

    /// The geometric `xi^k` shape of Lemma-style complete multiplicativity.
    pub fn is_geometric(&self) -> bool {
        matches!(self, Kappa::Scaled { scale, .. } if scale.is_one_exact())
    }
}

/// Predicate selecting a set of primes (for Liouville-like functions and
/// staged interval rules).
#[derive(Clone, Debug)]
pub enum PrimePredicate {
    All,
    /// `p = residue (mod modulus)`
    Congruent { modulus: u64, residue: u64 },
    List(Vec<u64>),
    /// union of inclusive intervals
    Intervals(Vec<(u64, u64)>),
}

impl PrimePredicate {
    pub fn contains(&self, p: u64) -> bool {
        match self {
            PrimePredicate::All => true,
            PrimePredicate::Congruent { modulus, residue } => p % modulus == *residue,
            PrimePredicate::List(v) => v.binary_search(&p).is_ok(),
            PrimePredicate::Intervals(iv) => iv.iter().any(|&(a, b)| a <= p && p <= b),
        }
    }
}

/// One stage of the staged interval construction: phase `p^{i s}` on
/// `[t_start, t_mid)` and `-1` on `[t_mid, t_end)`.
#[derive(Clone, Copy, Debug)]
pub struct MrtStage {
    pub t_start: u64,
    pub s: u64,
    pub t_mid: u64,
    pub t_end: u64,
}

/// Exact certificate that the function agrees with a Dirichlet character
/// away from a finite set of primes: `f(p^k) = chi(p^k)` for every prime
/// `p` outside `modified`.
#[derive(Clone, Debug)]
pub struct ToeplitzCertificate {
    pub chi: DirichletCharacter,
    pub modified: Vec<u64>,
}

impl ToeplitzCertificate {
    /// The exact period attached to position `n`:
    /// `T(n) = d * prod over p in F of p^{nu_p(n)+1}`.
    /// `f(n + s T(n)) = f(n)` holds for all `s`, not just on a truncation.
    pub fn certified_period(&self, n: u64) -> u64 {
        let mut t = self.chi.modulus();
        for &p in &self.modified {
            let mut m = n;
            let mut e = 1u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            t *= p.pow(e);
        }
        t
    }
}

#[derive(Clone, Debug)]
enum Rule {
    Character(Arc<DirichletCharacter>),
    Liouville,
    LiouvilleLike(PrimePredicate),
    Archimedean(f64),
    LogLogPhase,
    Mrt(Vec<MrtStage>),
    Damped(Frac),
    Modified { base: Box<Rule>, kappa: BTreeMap<u64, Kappa> },
    Product(Box<Rule>, Box<Rule>),
    Power(Box<Rule>, u64),
    Conjugate(Box<Rule>),
    Twist { base: Box<Rule>, t: f64 },
}

impl Rule {
    fn value_at(&self, p: u64, k: u64) -> Value {
        debug_assert!(k >= 1);
        match self {
            Rule::Character(chi) => Value::root(chi.eval_prime_power(p, k)),
            Rule::Liouville => sign_pow(k),
            Rule::LiouvilleLike(pred) => {
                if pred.contains(p) {
                    sign_pow(k)
                } else {
                    Value::one()
                }
            }
            Rule::Archimedean(t) => {
                Value::approx(Complex64::from_polar(1.0, k as f64 * t * (p as f64).ln()))
            }
            Rule::LogLogPhase => {
                if p < 16 {
                    Value::one()
                } else {
                    let phase = TAU / (p as f64).ln().ln();
                    Value::approx(Complex64::from_polar(1.0, k as f64 * phase))
                }
            }
            Rule::Mrt(stages) => mrt_prime_value(stages, p).powi(k),
            Rule::Damped(c) => Value::exact(*c, RootOfUnity::one()).powi(k),
            Rule::Modified { base, kappa } => match kappa.get(&p) {
                Some(kap) => kap.eval(k),
                None => base.value_at(p, k),
            },
            Rule::Product(a, b) => a.value_at(p, k).mul(b.value_at(p, k)),
            Rule::Power(base, m) => base.value_at(p, k).powi(*m),
            Rule::Conjugate(base) => base.value_at(p, k).conj(),
            Rule::Twist { base, t } => base
                .value_at(p, k)
                .mul(Value::approx(Complex64::from_polar(1.0, k as f64 * t * (p as f64).ln()))),
        }
    }
}

impl Rule {
    /// Structural proof that `k -> value_at(p, k)` is eventually periodic:
    /// returns `(preperiod, period)` when the rule shape guarantees it,
    /// `None` when it cannot be established (e.g. irrational phases).
    fn prime_power_profile(&self, p: u64) -> Option<(u64, u64)> {
        match self {
            Rule::Character(chi) => {
                let m = chi.modulus();
                if crate::arith::gcd_u64(p, m) != 1 {
                    Some((0, 1)) // identically zero for k >= 1
                } else {
                    let mut ord = 1u64;
                    while pow_mod(p, ord, m) != 1 {
                        ord += 1;
                    }
                    Some((0, ord))
                }
            }
            Rule::Liouville => Some((0, 2)),
            Rule::LiouvilleLike(pred) => {
                if pred.contains(p) {
                    Some((0, 2))
                } else {
                    Some((0, 1))
                }
            }
            Rule::Archimedean(t) => {
                if *t == 0.0 {
                    Some((0, 1))
                } else {
                    None
                }
            }
            Rule::LogLogPhase => {
                if p < 16 {
                    Some((0, 1))
                } else {
                    None
                }
            }
            Rule::Mrt(stages) => {
                if mrt_prime_value(stages, p) == Value::minus_one() {
                    Some((0, 2))
                } else {
                    None
                }
            }
            Rule::Damped(c) => {
                if c.is_zero() || c.is_one() {
                    Some((0, 1))
                } else {
                    None
                }
            }
            Rule::Modified { base, kappa } => match kappa.get(&p) {
                None => base.prime_power_profile(p),
                Some(Kappa::EventuallyPeriodic { head, cycle }) => {
                    Some((head.len() as u64, cycle.len() as u64))
                }
                Some(Kappa::Scaled { scale, ratio }) => match ratio {
                    Value::Exact { mag, root } => {
                        if mag.is_zero() || scale.is_zero_exact() {
                            Some((0, 1))
                        } else if mag.is_one() {
                            Some((0, root.order().unwrap_or(1)))
                        } else {
                            None
                        }
                    }
                    Value::Approx(_) => None,
                },
            },
            Rule::Product(a, b) => {
                let (pa, qa) = a.prime_power_profile(p)?;
                let (pb, qb) = b.prime_power_profile(p)?;
                Some((pa.max(pb), crate::arith::lcm_u64(qa, qb)))
            }
            Rule::Power(base, _) => base.prime_power_profile(p),
            Rule::Conjugate(base) => base.prime_power_profile(p),
            Rule::Twist { base, t } => {
                if *t == 0.0 {
                    base.prime_power_profile(p)
                } else {
                    None
                }
            }
        }
    }
}

fn sign_pow(k: u64) -> Value {
    if k % 2 == 0 {
        Value::one()
    } else {
        Value::minus_one()
    }
}

fn mrt_prime_value(stages: &[MrtStage], p: u64) -> Value {
    if p < stages[0].t_start {
        // below the first stage the phase of the first stage applies
        // (the bound |f(p) - p^{i s_2}| < 1/t_1^2 holds with equality 0)
        return arch_value(p, stages[0].s as f64);
    }
    for st in stages {
        if p < st.t_mid {
            return arch_value(p, st.s as f64);
        }
        if p < st.t_end {
            return Value::minus_one();
        }
    }
    // beyond the last configured stage the -1 regime persists
    Value::minus_one()
}

fn arch_value(p: u64, s: f64) -> Value {
    Value::approx(Complex64::from_polar(1.0, s * (p as f64).ln()))
}

/// A multiplicative function described by its prime-power rule.
#[derive(Clone, Debug)]
pub struct MultFunction {
    rule: Rule,
    completely_multiplicative: bool,
    certificate: Option<ToeplitzCertificate>,
    label: String,
}

impl MultFunction {
    /// `f = chi` extended multiplicatively (it already is completely
    /// multiplicative); certified with an empty modified set.
    pub fn from_character(chi: DirichletCharacter) -> Self {
        let label = format!("chi_mod_{}", chi.modulus());
        MultFunction {
            certificate: Some(ToeplitzCertificate { chi: chi.clone(), modified: Vec::new() }),
            rule: Rule::Character(Arc::new(chi)),
            completely_multiplicative: true,
            label,
        }
    }

    /// Overrides the rule at the given primes. A certified base stays
    /// certified with the modified set enlarged.
    pub fn modify_at_primes(&self, kappa: BTreeMap<u64, Kappa>) -> Self {
        let geometric = kappa.values().all(|k| k.is_geometric());
        let mut merged = match &self.rule {
            Rule::Modified { kappa: old, .. } => old.clone(),
            _ => BTreeMap::new(),
        };
        let base = match &self.rule {
            Rule::Modified { base, .. } => base.clone(),
            other => Box::new(other.clone()),
        };
        merged.extend(kappa.clone());
        let certificate = self.certificate.as_ref().map(|c| {
            let mut modified = c.modified.clone();
            for p in kappa.keys() {
                if !modified.contains(p) {
                    modified.push(*p);
                }
            }
            modified.sort_unstable();
            ToeplitzCertificate { chi: c.chi.clone(), modified }
        });
        MultFunction {
            rule: Rule::Modified { base, kappa: merged },
            completely_multiplicative: self.completely_multiplicative && geometric,
            certificate,
            label: format!("{}_mod@{:?}", self.label, kappa.keys().collect::<Vec<_>>()),
        }
    }

    /// `lambda(p^k) = (-1)^k` for all primes.
    pub fn liouville() -> Self {
        MultFunction {
            rule: Rule::Liouville,
            completely_multiplicative: true,
            certificate: None,
            label: "liouville".into(),
        }
    }

    /// `lambda_P(p^k) = (-1)^k` for `p` in the prime set, `1` elsewhere.
    ///
    /// A finite explicit prime list yields a certificate: the function
    /// agrees with the principal character mod 1 off that list.
    pub fn liouville_like(mut pred: PrimePredicate) -> Self {
        if let PrimePredicate::List(v) = &mut pred {
            v.sort_unstable();
            v.dedup();
        }
        let certificate = match &pred {
            PrimePredicate::List(v) => Some(ToeplitzCertificate {
                chi: DirichletCharacter::principal(1),
                modified: v.clone(),
            }),
            _ => None,
        };
        MultFunction {
            rule: Rule::LiouvilleLike(pred),
            completely_multiplicative: true,
            certificate,
            label: "liouville_like".into(),
        }
    }

    /// The Archimedean character `n -> n^{it}`.
    pub fn archimedean(t: f64) -> Self {
        MultFunction {
            rule: Rule::Archimedean(t),
            completely_multiplicative: true,
            certificate: None,
            label: format!("n^(i*{t})"),
        }
    }

    /// Multiplies the rule by `p^{ikt}` (i.e. `f(n) -> f(n) n^{it}`).
    pub fn twist(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        MultFunction {
            rule: Rule::Twist { base: Box::new(self.rule.clone()), t },
            completely_multiplicative: self.completely_multiplicative,
            certificate: None,
            label: format!("{}*n^(i*{t})", self.label),
        }
    }

    /// Completely multiplicative with `f(p) = e^{2 pi i / log log p}`
    /// for `p >= 16` and `f(p) = 1` below.
    pub fn loglog_phase() -> Self {
        MultFunction {
            rule: Rule::LogLogPhase,
            completely_multiplicative: true,
            certificate: None,
            label: "loglog_phase".into(),
        }
    }

    /// Completely multiplicative with constant magnitude `c < 1` on primes:
    /// `f(p^k) = c^k`.
    pub fn damped(c: Frac) -> Self {
        MultFunction {
            rule: Rule::Damped(c),
            completely_multiplicative: true,
            certificate: None,
            label: format!("damped_{}_{}", c.num, c.den),
        }
    }

    /// Staged prime-interval construction: per stage, `f(p) = p^{is}` on
    /// `[t_start, t_mid)` and `f(p) = -1` on `[t_mid, t_end)`; completely
    /// multiplicative. Stages must interleave as
    /// `t_start < s < s^2 < t_mid < t_end` and chain contiguously. The
    /// double-exponential growth condition `t_end > e^{e^{t_mid}}` is not
    /// enforceable at practical scales and only triggers a warning.
    pub fn mrt_modified(stages: Vec<MrtStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Argument("at least one stage required".into()));
        }
        for (i, st) in stages.iter().enumerate() {
            if !(st.t_start < st.s
                && (st.s as u128) * (st.s as u128) < st.t_mid as u128
                && st.t_mid < st.t_end)
            {
                return Err(Error::Argument(format!(
                    "stage {i} violates t_start < s < s^2 < t_mid < t_end: {st:?}"
                )));
            }
            if i + 1 < stages.len() && stages[i + 1].t_start != st.t_end {
                return Err(Error::Argument(format!(
                    "stage {} must start at the previous t_end {}",
                    i + 1,
                    st.t_end
                )));
            }
            let double_exp_ok =
                (st.t_mid as f64) < (st.t_end as f64).ln().ln();
            if !double_exp_ok {
                log::warn!(
                    "stage {i}: t_end={} <= e^e^t_mid (t_mid={}); growth condition waived",
                    st.t_end,
                    st.t_mid
                );
            }
        }
        Ok(MultFunction {
            rule: Rule::Mrt(stages),
            completely_multiplicative: true,
            certificate: None,
            label: "mrt_modified".into(),
        })
    }

    /// Pointwise product; certificates merge (character product, union of
    /// modified sets) when both factors are certified and the lcm modulus
    /// stays within bounds.
    pub fn product(a: &MultFunction, b: &MultFunction) -> Self {
        let certificate = match (&a.certificate, &b.certificate) {
            (Some(ca), Some(cb)) => match char_product(&ca.chi, &cb.chi) {
                Ok(chi) => {
                    let mut modified = ca.modified.clone();
                    for p in &cb.modified {
                        if !modified.contains(p) {
                            modified.push(*p);
                        }
                    }
                    modified.sort_unstable();
                    Some(ToeplitzCertificate { chi, modified })
                }
                Err(_) => {
                    log::warn!("product certificate dropped: lcm modulus out of bounds");
                    None
                }
            },
            _ => None,
        };
        MultFunction {
            rule: Rule::Product(Box::new(a.rule.clone()), Box::new(b.rule.clone())),
            completely_multiplicative: a.completely_multiplicative && b.completely_multiplicative,
            certificate,
            label: format!("({})*({})", a.label, b.label),
        }
    }

    /// Pointwise `f^m`.
    pub fn power(&self, m: u64) -> Self {
        let certificate = self.certificate.as_ref().map(|c| ToeplitzCertificate {
            chi: c.chi.pow(m),
            modified: c.modified.clone(),
        });
        MultFunction {
            rule: Rule::Power(Box::new(self.rule.clone()), m),
            completely_multiplicative: self.completely_multiplicative,
            certificate,
            label: format!("({})^{m}", self.label),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let certificate = self.certificate.as_ref().map(|c| ToeplitzCertificate {
            chi: c.chi.conj(),
            modified: c.modified.clone(),
        });
        MultFunction {
            rule: Rule::Conjugate(Box::new(self.rule.clone())),
            completely_multiplicative: self.completely_multiplicative,
            certificate,
            label: format!("conj({})", self.label),
        }
    }

    /// The inverse construction for periodic multiplicative functions:
    /// `f(n) = theta(n)` off the primes `q_i`, free values `head` at
    /// `q_i, q_i^2, ..., q_i^{b_i}`, and
    /// `f(q_i^{b_i + l}) = f(q_i^{b_i}) theta(q_i^l)` beyond. The result is
    /// `q_1^{b_1} ... q_u^{b_u} t`-periodic.
    pub fn periodic_from_data(
        theta: DirichletCharacter,
        data: Vec<(u64, u32, Vec<Value>)>,
    ) -> Result<Self> {
        let t = theta.modulus();
        let mut kappa = BTreeMap::new();
        for (q, b, head) in &data {
            if head.len() != *b as usize {
                return Err(Error::Argument(format!(
                    "prime {q}: expected {b} free values, got {}",
                    head.len()
                )));
            }
            if *b == 0 {
                return Err(Error::Argument("exponent b must be >= 1".into()));
            }
            if kappa.contains_key(q) {
                return Err(Error::Argument(format!("duplicate prime {q}")));
            }
            let last = *head.last().unwrap();
            let cycle = if crate::arith::gcd_u64(*q, t) != 1 {
                vec![Value::zero()]
            } else {
                // theta(q^l) is periodic in l with the order of q mod t
                let mut ord = 1u64;
                while pow_mod(*q, ord, t) != 1 {
                    ord += 1;
                }
                (1..=ord).map(|l| last.mul(Value::root(theta.eval_prime_power(*q, l)))).collect()
            };
            kappa.insert(*q, Kappa::EventuallyPeriodic { head: head.clone(), cycle });
        }
        let base = MultFunction::from_character(theta);
        let mut f = base.modify_at_primes(kappa);
        f.label = format!("periodic_from_mod_{t}");
        Ok(f)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_completely_multiplicative(&self) -> bool {
        self.completely_multiplicative
    }

    pub fn certificate(&self) -> Option<&ToeplitzCertificate> {
        self.certificate.as_ref()
    }

    /// Rule value at the prime power `p^k` (`k >= 1`); needs no sieve.
    pub fn prime_power_value(&self, p: u64, k: u64) -> Value {
        self.rule.value_at(p, k)
    }

    /// `(preperiod, period)` of `k -> f(p^k)` when the rule shape proves
    /// eventual periodicity.
    pub fn prime_power_profile(&self, p: u64) -> Option<(u64, u64)> {
        self.rule.prime_power_profile(p)
    }

    /// Algebraic proof of periodicity for a certified function: finds, for
    /// each modified prime `p`, the least `b_p` with
    /// `f(p^{b_p + l}) = f(p^{b_p}) chi(p^l)` for all `l >= 1` (verified
    /// over a provably sufficient range using the rule's structural
    /// profile), and returns the exact period
    /// `prod p^{b_p} * modulus(chi)`. `None` when some modified prime does
    /// not stabilise, i.e. the function is not provably periodic.
    pub fn certified_periodic_period(&self) -> Option<u64> {
        let cert = self.certificate.as_ref()?;
        let d = cert.chi.modulus();
        let mut q_part = 1u64;
        for &p in &cert.modified {
            let (pre, per) = self.prime_power_profile(p)?;
            let chi_per = match cert.chi.eval(p) {
                // p | d: chi(p^l) = 0 for l >= 1, constant
                v if v.is_zero() => 1,
                _ => {
                    let mut ord = 1u64;
                    while pow_mod(p, ord, d) != 1 {
                        ord += 1;
                    }
                    ord
                }
            };
            let span = crate::arith::lcm_u64(per.max(1), chi_per) + 1;
            let b_p = (0..=pre + per).find(|&b| {
                let vb = if b == 0 { Value::one() } else { self.rule.value_at(p, b) };
                (1..=span).all(|l| {
                    let lhs = self.rule.value_at(p, b + l);
                    let rhs = vb.mul(Value::root(cert.chi.eval_prime_power(p, l)));
                    lhs.eq_within(&rhs, 0.0)
                })
            })?;
            q_part = q_part.checked_mul(p.checked_pow(b_p as u32)?)?;
        }
        q_part.checked_mul(d)
    }

    /// Rule value at a prime.
    pub fn prime_value(&self, p: u64) -> Value {
        self.rule.value_at(p, 1)
    }

    /// Evaluates `f(n)` through the factorization of `n`.
    pub fn evaluate(&self, n: u64, table: &PrimeTable) -> Result<Value> {
        let fac = factorize(n, table)?;
        let mut acc = Value::one();
        for &(p, k) in &fac.parts {
            acc = acc.mul(self.rule.value_at(p, k as u64));
        }
        Ok(acc)
    }

    /// `f(n)` as a complex float.
    pub fn evaluate_complex(&self, n: u64, table: &PrimeTable) -> Result<Complex64> {
        Ok(self.evaluate(n, table)?.to_complex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve;
    use crate::characters::enumerate_characters;

    fn chi3() -> DirichletCharacter {
        enumerate_characters(3).unwrap().into_iter().find(|c| !c.is_principal()).unwrap()
    }

    /// The modulus-3 example: chi mod 3 with the rule at 2 replaced by
    /// the constant 1, i.e. f(n) = chi(n / 2^{nu_2(n)}).
    pub(crate) fn example_mod3() -> MultFunction {
        MultFunction::from_character(chi3())
            .modify_at_primes(BTreeMap::from([(2, Kappa::constant(Value::one()))]))
            .with_label("example_mod3")
    }

    #[test]
    fn example_mod3_values() {
        let t = sieve(1000).unwrap();
        let f = example_mod3();
        assert_eq!(f.evaluate(10, &t).unwrap(), Value::minus_one());
        for k in 1..=9 {
            assert!(f.evaluate(1 << k, &t).unwrap().is_one_exact());
        }
        assert!(f.evaluate(1, &t).unwrap().is_one_exact());
        // completely multiplicative: kappa_2(k) = 1 = 1^k is geometric
        assert!(f.is_completely_multiplicative());
        let c = f.certificate().unwrap();
        assert_eq!(c.chi.modulus(), 3);
        assert_eq!(c.modified, vec![2]);
    }

    #[test]
    fn from_character_plain() {
        let t = sieve(100).unwrap();
        let f = MultFunction::from_character(chi3());
        for n in 1..=100u64 {
            let expect = Value::root(chi3().eval(n));
            assert_eq!(f.evaluate(n, &t).unwrap(), expect);
        }
        assert!(f.certificate().unwrap().modified.is_empty());
    }

    #[test]
    fn sign_of_valuation_function() {
        // f(n) = (-1)^{nu_p(n)} as principal mod 1 modified at p
        let t = sieve(1000).unwrap();
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let f = one.modify_at_primes(BTreeMap::from([(2, Kappa::alternating())]));
        for n in 1..=500u64 {
            let expect = if crate::valuation(n, 2) % 2 == 0 {
                Value::one()
            } else {
                Value::minus_one()
            };
            assert_eq!(f.evaluate(n, &t).unwrap(), expect, "n={n}");
        }
        assert!(f.is_completely_multiplicative());
    }

    #[test]
    fn liouville_values() {
        let t = sieve(100).unwrap();
        let l = MultFunction::liouville();
        assert_eq!(l.evaluate(12, &t).unwrap(), Value::minus_one());
        assert_eq!(l.evaluate(4, &t).unwrap(), Value::one());
        // lambda^2 = 1
        let sq = l.power(2);
        for n in 1..=100 {
            assert!(sq.evaluate(n, &t).unwrap().is_one_exact());
        }
    }

    #[test]
    fn liouville_like_variants() {
        let t = sieve(100).unwrap();
        let empty = MultFunction::liouville_like(PrimePredicate::List(vec![]));
        for n in 1..=100 {
            assert!(empty.evaluate(n, &t).unwrap().is_one_exact());
        }
        let mod4 = MultFunction::liouville_like(PrimePredicate::Congruent {
            modulus: 4,
            residue: 1,
        });
        assert_eq!(mod4.prime_value(5), Value::minus_one());
        assert_eq!(mod4.prime_value(3), Value::one());
    }

    #[test]
    fn archimedean_values() {
        let t = sieve(100).unwrap();
        let a0 = MultFunction::archimedean(0.0);
        for n in 1..=50 {
            assert!((a0.evaluate_complex(n, &t).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let a1 = MultFunction::archimedean(1.0);
        for n in 1..=50u64 {
            let z = a1.evaluate_complex(n, &t).unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-12);
            let direct = Complex64::from_polar(1.0, (n as f64).ln());
            assert!((z - direct).norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn perturbed_archimedean_identity() {
        // f(n) = n^{it} for odd n, f(2^k) = -2^{ikt}: equals (-1)^{n+1} n^{it}
        // for every n, including nu_2(n) >= 2.
        let t = sieve(200).unwrap();
        let f = MultFunction::archimedean(1.0)
            .modify_at_primes(BTreeMap::from([(2, perturbed_kappa(1.0))]));
        for n in 1..=200u64 {
            let z = f.evaluate_complex(n, &t).unwrap();
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            let direct = Complex64::from_polar(1.0, (n as f64).ln()) * sign;
            assert!((z - direct).norm() < 1e-10, "n={n}");
        }
    }

    pub(crate) fn perturbed_kappa(t: f64) -> Kappa {
        // kappa(k) = -2^{ikt} = (-1) * (2^{it})^k
        Kappa::Scaled {
            scale: Value::minus_one(),
            ratio: Value::approx(Complex64::from_polar(1.0, t * 2f64.ln())),
        }
    }

    #[test]
    fn product_certificates_merge() {
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let f = one.modify_at_primes(BTreeMap::from([(2, Kappa::alternating())]));
        let g = one.modify_at_primes(BTreeMap::from([(3, Kappa::alternating())]));
        let h = MultFunction::product(&f, &g);
        let t = sieve(2000).unwrap();
        for n in 1..=2000u64 {
            let expect = if (crate::valuation(n, 2) + crate::valuation(n, 3)) % 2 == 0 {
                Value::one()
            } else {
                Value::minus_one()
            };
            assert_eq!(h.evaluate(n, &t).unwrap(), expect, "n={n}");
        }
        let c = h.certificate().unwrap();
        assert_eq!(c.modified, vec![2, 3]);
        assert_eq!(c.chi.modulus(), 1);
    }

    #[test]
    fn conjugate_cancels() {
        let t = sieve(100).unwrap();
        let cs = enumerate_characters(5).unwrap();
        let chi = cs.iter().find(|c| !c.is_principal()).unwrap().clone();
        let f = MultFunction::from_character(chi);
        let g = MultFunction::product(&f, &f.conjugate());
        for n in 1..=100u64 {
            let v = g.evaluate(n, &t).unwrap();
            if n % 5 == 0 {
                assert!(v.is_zero_exact());
            } else {
                assert!(v.is_one_exact());
            }
        }
    }

    #[test]
    fn loglog_phase_values() {
        let f = MultFunction::loglog_phase();
        assert!(f.prime_value(2).is_one_exact());
        assert!(f.prime_value(13).is_one_exact());
        let v = f.prime_value(999983); // prime near 1e6
        let z = v.to_complex();
        assert!((z.norm() - 1.0).abs() < 1e-12);
        let expected_phase = TAU / (999983f64).ln().ln();
        assert!((z.arg() - expected_phase).abs() < 1e-9);
        assert!(expected_phase < TAU / 2.6 && expected_phase > TAU / 2.7);
    }

    #[test]
    fn mrt_stage_rules() {
        let stages = vec![MrtStage { t_start: 10, s: 100, t_mid: 100_000, t_end: 1_000_000 }];
        let f = MultFunction::mrt_modified(stages).unwrap();
        // phase regime
        let p = 101u64; // in [10, 1e5)
        let z = f.prime_value(p).to_complex();
        assert!((z - Complex64::from_polar(1.0, 100.0 * (p as f64).ln())).norm() < 1e-10);
        // -1 regime
        assert_eq!(f.prime_value(100_003), Value::minus_one());
        // below the first stage: first-stage phase
        let z2 = f.prime_value(7).to_complex();
        assert!((z2 - Complex64::from_polar(1.0, 100.0 * 7f64.ln())).norm() < 1e-10);
        // unimodular everywhere
        for p in [2u64, 11, 1009, 100_003, 999_983] {
            assert!((f.prime_value(p).to_complex().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mrt_rejects_bad_interleave() {
        let stages = vec![MrtStage { t_start: 10, s: 5, t_mid: 100_000, t_end: 1_000_000 }];
        assert!(matches!(MultFunction::mrt_modified(stages), Err(Error::Argument(_))));
        let stages = vec![MrtStage { t_start: 10, s: 100, t_mid: 9_999, t_end: 1_000_000 }];
        assert!(matches!(MultFunction::mrt_modified(stages), Err(Error::Argument(_))));
    }

    #[test]
    fn damped_magnitude() {
        let t = sieve(100).unwrap();
        let f = MultFunction::damped(Frac::new(1, 2));
        assert_eq!(f.evaluate(4, &t).unwrap().norm(), 0.25);
        assert_eq!(f.evaluate(6, &t).unwrap().norm(), 0.25);
        assert!(f.is_completely_multiplicative());
    }

    #[test]
    fn periodic_from_data_builder() {
        let theta = chi3();
        let f = MultFunction::periodic_from_data(
            theta.clone(),
            vec![(2, 2, vec![Value::minus_one(), Value::one()])],
        )
        .unwrap();
        // f(2) = -1, f(4) = 1, f(2^{2+l}) = f(4) theta(2^l)
        assert_eq!(f.prime_power_value(2, 1), Value::minus_one());
        assert!(f.prime_power_value(2, 2).is_one_exact());
        for l in 1..=6u64 {
            let expect = Value::root(theta.eval_prime_power(2, l));
            assert_eq!(f.prime_power_value(2, 2 + l), expect, "l={l}");
        }
        // q | t branch: modify at 3 with theta mod 3
        let g = MultFunction::periodic_from_data(theta.clone(), vec![(3, 1, vec![Value::one()])])
            .unwrap();
        assert!(g.prime_power_value(3, 1).is_one_exact());
        for l in 1..=4u64 {
            assert!(g.prime_power_value(3, 1 + l).is_zero_exact());
        }
    }

    #[test]
    fn power_of_certificate() {
        let f = example_mod3();
        let sq = f.power(2);
        let c = sq.certificate().unwrap();
        assert!(c.chi.is_principal());
        let t = sieve(500).unwrap();
        for n in (1..=500u64).filter(|n| n % 3 != 0) {
            assert!(sq.evaluate(n, &t).unwrap().is_one_exact());
        }
    }

    #[test]
    fn certified_period_formula() {
        let f = example_mod3();
        let c = f.certificate().unwrap();
        // T(n) = 3 * 2^{nu_2(n)+1}
        assert_eq!(c.certified_period(1), 6);
        assert_eq!(c.certified_period(4), 24);
        assert_eq!(c.certified_period(9), 6);
        assert_eq!(c.certified_period(8), 48);
    }
}

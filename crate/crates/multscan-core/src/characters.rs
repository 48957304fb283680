//! Exact Dirichlet character arithmetic.
//!
//! Characters are stored as full value tables of length `m` (exact roots of
//! unity, zero off the coprime residues). At the moduli this crate targets
//! (<= 10^4) that keeps every check an exact table lookup.

use crate::arith::{divisors, euler_phi, gcd_u64, lcm_u64, pow_mod};
use crate::value::{RootOfUnity, ValueJson};
use crate::{Error, Result, Value};
use serde::{Deserialize, Serialize};

/// Largest modulus for which characters are enumerated or induced.
pub const MAX_MODULUS: u64 = 10_000;

/// A Dirichlet character mod `m` as its full residue table.
///
/// `values[r]` is the value at residues `n = r (mod m)`; it is `Zero`
/// exactly when `gcd(r, m) > 1`, and a `phi(m)`-th root of unity otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<RootOfUnity>,
}

impl DirichletCharacter {
    /// Builds from a raw table after validating the character axioms.
    pub fn from_table(modulus: u64, values: Vec<RootOfUnity>) -> Result<Self> {
        if modulus == 0 || values.len() != modulus as usize {
            return Err(Error::Argument(format!(
                "table length {} does not match modulus {modulus}",
                values.len()
            )));
        }
        let chi = DirichletCharacter { modulus, values };
        chi.validate()?;
        Ok(chi)
    }

    /// The principal character mod `m` (1 on residues coprime to m).
    pub fn principal(m: u64) -> Self {
        let values = (0..m)
            .map(|r| {
                if gcd_u64(r, m) == 1 {
                    RootOfUnity::one()
                } else {
                    RootOfUnity::Zero
                }
            })
            .collect();
        DirichletCharacter { modulus: m, values }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn table(&self) -> &[RootOfUnity] {
        &self.values
    }

    /// Value at `n` (by `n mod m`).
    pub fn eval(&self, n: u64) -> RootOfUnity {
        self.values[(n % self.modulus) as usize]
    }

    /// Value at the prime power `p^k` without forming the integer.
    pub fn eval_prime_power(&self, p: u64, k: u64) -> RootOfUnity {
        self.eval(pow_mod(p, k, self.modulus))
    }

    pub fn eval_value(&self, n: u64) -> Value {
        Value::root(self.eval(n))
    }

    pub fn is_principal(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.is_one())
    }

    /// Complete multiplicativity, chi(1)=1, vanishing exactly off coprimes,
    /// and the root-of-unity constraint, all checked exactly on the table.
    pub fn validate(&self) -> Result<()> {
        let m = self.modulus;
        if m == 1 {
            if self.values[0].is_one() {
                return Ok(());
            }
            return Err(Error::Classification("character mod 1 must be constant 1".into()));
        }
        if !self.values[1].is_one() {
            return Err(Error::Classification("chi(1) != 1".into()));
        }
        for r in 0..m {
            let coprime = gcd_u64(r, m) == 1;
            if coprime == self.values[r as usize].is_zero() {
                return Err(Error::Classification(format!(
                    "chi({r}) zero pattern disagrees with gcd(r, {m})"
                )));
            }
        }
        let phi = euler_phi(m);
        for r in 0..m {
            let v = self.values[r as usize];
            if !v.is_zero() && !v.pow(phi).is_one() {
                return Err(Error::Classification(format!(
                    "chi({r}) is not a phi({m})-th root of unity"
                )));
            }
        }
        for a in 0..m {
            for b in a..m {
                let lhs = self.values[(a * b % m) as usize];
                let rhs = self.values[a as usize].mul(self.values[b as usize]);
                if lhs != rhs {
                    return Err(Error::Classification(format!(
                        "chi({a}*{b}) != chi({a})chi({b}) mod {m}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pointwise complex conjugate (the inverse character).
    pub fn conj(&self) -> Self {
        DirichletCharacter {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise `chi^k` (same modulus).
    pub fn pow(&self, k: u64) -> Self {
        DirichletCharacter {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.pow(k)).collect(),
        }
    }

    pub fn to_json(&self) -> CharacterJson {
        CharacterJson {
            modulus: self.modulus,
            values: self
                .values
                .iter()
                .map(|v| match v {
                    RootOfUnity::Zero => None,
                    RootOfUnity::Turn { num, den } => Some([*num, *den]),
                })
                .collect(),
        }
    }
}

/// JSON form: `{ "modulus": m, "values": [[num,den] or null, ...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharacterJson {
    pub modulus: u64,
    pub values: Vec<Option<[u64; 2]>>,
}

impl CharacterJson {
    pub fn to_character(&self) -> Result<DirichletCharacter> {
        let values = self
            .values
            .iter()
            .map(|v| match v {
                None => Ok(RootOfUnity::Zero),
                Some([_, 0]) => Err(Error::Argument("zero denominator in character".into())),
                Some([n, d]) => Ok(RootOfUnity::new(*n as i64, *d)),
            })
            .collect::<Result<Vec<_>>>()?;
        DirichletCharacter::from_table(self.modulus, values)
    }
}

/// One cyclic component of `(Z/mZ)*`: a generator `g` mod `m` of order `ord`,
/// with a discrete-log table for the prime-power block it comes from.
struct CyclicComponent {
    #[allow(dead_code)]
    prime_power: u64,
    generator: u64,
    order: u64,
    dlog: Vec<u64>, // index: residue mod prime_power (coprime ones filled)
}

fn component_for_odd_prime_power(q: u64) -> CyclicComponent {
    let phi = euler_phi(q);
    // smallest primitive root
    let mut g = 2;
    loop {
        if gcd_u64(g, q) == 1 && is_generator(g, phi, q) {
            break;
        }
        g += 1;
    }
    CyclicComponent { prime_power: q, generator: g, order: phi, dlog: dlog_table(g, phi, q) }
}

fn is_generator(g: u64, order: u64, m: u64) -> bool {
    // g generates iff g^{order/p} != 1 for every prime p | order
    let mut o = order;
    let mut p = 2;
    while p * p <= o {
        if o % p == 0 {
            if pow_mod(g, order / p, m) == 1 {
                return false;
            }
            while o % p == 0 {
                o /= p;
            }
        }
        p += 1;
    }
    if o > 1 && pow_mod(g, order / o, m) == 1 {
        return false;
    }
    true
}

fn dlog_table(g: u64, order: u64, m: u64) -> Vec<u64> {
    let mut table = vec![u64::MAX; m as usize];
    let mut x = 1u64;
    for e in 0..order {
        table[x as usize] = e;
        x = x * g % m;
    }
    table
}

/// Enumerates all `phi(m)` Dirichlet characters of modulus `m`, in a
/// deterministic order (sorted by value table).
pub fn enumerate_characters(m: u64) -> Result<Vec<DirichletCharacter>> {
    if m == 0 {
        return Err(Error::Argument("modulus must be positive".into()));
    }
    if m > MAX_MODULUS {
        return Err(Error::Resource(format!("modulus {m} exceeds bound {MAX_MODULUS}")));
    }
    if m == 1 {
        return Ok(vec![DirichletCharacter::principal(1)]);
    }

    // CRT decomposition of (Z/mZ)* into cyclic components.
    let mut components: Vec<CyclicComponent> = Vec::new();
    let mut rest = m;
    let mut two_part = 1u64;
    while rest % 2 == 0 {
        rest /= 2;
        two_part *= 2;
    }
    match two_part {
        1 | 2 => {}
        4 => components.push(CyclicComponent {
            prime_power: 4,
            generator: 3,
            order: 2,
            dlog: dlog_table(3, 2, 4),
        }),
        q => {
            // (Z/2^aZ)* = <-1> x <5>
            components.push(CyclicComponent {
                prime_power: q,
                generator: q - 1,
                order: 2,
                dlog: dlog_table(q - 1, 2, q),
            });
            components.push(CyclicComponent {
                prime_power: q,
                generator: 5,
                order: q / 4,
                dlog: dlog_table(5, q / 4, q),
            });
        }
    }
    let mut p = 3u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut q = 1;
            while rest % p == 0 {
                rest /= p;
                q *= p;
            }
            components.push(component_for_odd_prime_power(q));
        }
        p += 2;
    }
    if rest > 1 {
        components.push(component_for_odd_prime_power(rest));
    }

    // The two 2^a components share a prime-power block; resolve exponents
    // jointly: n = (-1)^{e0} 5^{e1} mod 2^a.
    let mut chars = Vec::new();
    let mut choice = vec![0u64; components.len()];
    loop {
        let mut values = vec![RootOfUnity::Zero; m as usize];
        for r in 0..m {
            if gcd_u64(r, m) != 1 {
                continue;
            }
            let mut v = RootOfUnity::one();
            let mut i = 0;
            while i < components.len() {
                let comp = &components[i];
                let q = comp.prime_power;
                if q % 2 == 0 && q >= 8 {
                    // joint exponent extraction for <-1> x <5>
                    let rq = r % q;
                    let (e0, e1) = two_power_dlog(rq, q);
                    let k0 = choice[i];
                    let k1 = choice[i + 1];
                    v = v.mul(RootOfUnity::new((k0 * e0) as i64, 2));
                    v = v.mul(RootOfUnity::new((k1 * e1) as i64, q / 4));
                    i += 2;
                } else {
                    let e = comp.dlog[(r % q) as usize];
                    debug_assert_ne!(e, u64::MAX);
                    v = v.mul(RootOfUnity::new((choice[i] * e) as i64, comp.order));
                    i += 1;
                }
            }
            values[r as usize] = v;
        }
        chars.push(DirichletCharacter { modulus: m, values });

        // next choice vector
        let mut i = components.len();
        loop {
            if i == 0 {
                let phi = euler_phi(m) as usize;
                if chars.len() != phi {
                    return Err(Error::Classification(format!(
                        "enumeration produced {} characters, phi({m}) = {phi}",
                        chars.len()
                    )));
                }
                chars.sort_by(|a, b| a.values.cmp(&b.values));
                return Ok(chars);
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < components[i].order {
                break;
            }
            choice[i] = 0;
        }
    }
}

/// Writes `r = (-1)^{e0} 5^{e1} mod q` for `q = 2^a >= 8`.
fn two_power_dlog(r: u64, q: u64) -> (u64, u64) {
    let half_order = q / 4;
    let mut x = 1u64;
    for e1 in 0..half_order {
        if x == r {
            return (0, e1);
        }
        if q - x == r {
            return (1, e1);
        }
        x = x * 5 % q;
    }
    unreachable!("residue {r} not generated mod {q}")
}

/// Induces `theta` (mod t) to modulus `m` with `t | m`.
pub fn induce(theta: &DirichletCharacter, m: u64) -> Result<DirichletCharacter> {
    let t = theta.modulus();
    if t == 0 || m % t != 0 {
        return Err(Error::Argument(format!("{t} does not divide {m}")));
    }
    if m > MAX_MODULUS {
        return Err(Error::Resource(format!("modulus {m} exceeds bound {MAX_MODULUS}")));
    }
    let values = (0..m)
        .map(|r| if gcd_u64(r, m) == 1 { theta.eval(r) } else { RootOfUnity::Zero })
        .collect();
    Ok(DirichletCharacter { modulus: m, values })
}

/// The conductor of `chi`: the smallest `t | m` carrying a character that
/// induces `chi`, found by brute force over divisors, together with that
/// primitive character.
pub fn conductor(chi: &DirichletCharacter) -> (u64, DirichletCharacter) {
    let m = chi.modulus();
    for t in divisors(m) {
        if let Some(theta) = restrict_to(chi, t) {
            return (t, theta);
        }
    }
    (m, chi.clone()) // chi induces itself
}

/// Tries to realise `chi` as induced from modulus `t`; returns the inducing
/// character when it exists.
fn restrict_to(chi: &DirichletCharacter, t: u64) -> Option<DirichletCharacter> {
    let m = chi.modulus();
    let mut values = vec![RootOfUnity::Zero; t as usize];
    for r in 0..t {
        if gcd_u64(r, t) != 1 {
            continue;
        }
        // lift r to a residue mod m coprime to m
        let mut lift = None;
        let mut x = r;
        for _ in 0..m / t {
            if gcd_u64(x, m) == 1 {
                lift = Some(x);
                break;
            }
            x = (x + t) % m.max(1);
        }
        let lift = lift?;
        values[r as usize] = chi.eval(lift);
    }
    let theta = DirichletCharacter { modulus: t, values };
    // consistency: theta must reproduce chi on every residue coprime to m
    for n in 0..m {
        if gcd_u64(n, m) == 1 && chi.eval(n) != theta.eval(n) {
            return None;
        }
    }
    Some(theta)
}

/// True when no proper divisor modulus induces `chi`.
pub fn is_primitive(chi: &DirichletCharacter) -> bool {
    conductor(chi).0 == chi.modulus()
}

/// Pointwise product, induced to the lcm of the two moduli.
pub fn char_product(
    a: &DirichletCharacter,
    b: &DirichletCharacter,
) -> Result<DirichletCharacter> {
    let l = lcm_u64(a.modulus(), b.modulus());
    if l > MAX_MODULUS {
        return Err(Error::Resource(format!("lcm modulus {l} exceeds bound {MAX_MODULUS}")));
    }
    let values = (0..l)
        .map(|r| {
            if gcd_u64(r, l) == 1 {
                a.eval(r).mul(b.eval(r))
            } else {
                RootOfUnity::Zero
            }
        })
        .collect();
    Ok(DirichletCharacter { modulus: l, values })
}

/// Exact proof that `sum over a residue period of chi` vanishes for
/// non-principal `chi`: multiplication by any value `chi(a) != 1` permutes
/// the value multiset, so `(1 - chi(a)) * S = 0` with `chi(a) != 1`.
///
/// Returns `true` when the vanishing is proved exactly; principal characters
/// return `false` (their sum is `phi(m) != 0`).
pub fn orthogonality_sum_is_zero(chi: &DirichletCharacter) -> bool {
    let m = chi.modulus();
    let a = (0..m).find(|&a| {
        let v = chi.eval(a);
        !v.is_zero() && !v.is_one()
    });
    let Some(a) = a else {
        return false; // principal
    };
    let w = chi.eval(a);
    let mut original: Vec<RootOfUnity> = chi.table().to_vec();
    let mut scaled: Vec<RootOfUnity> = chi.table().iter().map(|v| v.mul(w)).collect();
    original.sort_unstable();
    scaled.sort_unstable();
    original == scaled
}

/// Serialises a character's table as values (for reports).
pub fn character_values_json(chi: &DirichletCharacter) -> Vec<ValueJson> {
    chi.table().iter().map(|r| ValueJson::from_value(&Value::root(*r))).collect()
}

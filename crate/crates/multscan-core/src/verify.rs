//! Named invariant batteries, bundled per module, with seeded sampling and
//! deterministic reports. These back the `verify` CLI subcommand; the same
//! checks run in the test suite.

use crate::arith::{self, PrimeTable};
use crate::characters::{
    conductor, enumerate_characters, induce, is_primitive,
    orthogonality_sum_is_zero, DirichletCharacter,
};
use crate::dynamics::{self, CorrelationSpec};
use crate::multfun::{Kappa, MultFunction, PrimePredicate};
use crate::pretense;
use crate::scan::complex_scan;
use crate::toeplitz::Analyzer;
use crate::value::{Frac, RootOfUnity};
use crate::{Result, Value};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail }
}

/// Random unimodular exact value (a root of unity of order <= 12).
pub fn random_root(rng: &mut ChaCha8Rng) -> Value {
    let den = rng.gen_range(1..=12u64);
    let num = rng.gen_range(0..den);
    Value::root(RootOfUnity::new(num as i64, den))
}

/// Random certified function: a character of modulus <= 30 modified at up
/// to three primes drawn from (30, 60], with unimodular exact kappa values.
pub fn random_certified(rng: &mut ChaCha8Rng) -> Result<MultFunction> {
    let m = rng.gen_range(1..=30u64);
    let chars = enumerate_characters(m)?;
    let chi = chars[rng.gen_range(0..chars.len())].clone();
    let pool = [31u64, 37, 41, 43, 47, 53, 59];
    let count = rng.gen_range(1..=3usize);
    let mut kappa = BTreeMap::new();
    for &p in pool.choose_multiple(rng, count) {
        let kap = match rng.gen_range(0..3u8) {
            0 => Kappa::constant(random_root(rng)),
            1 => Kappa::geometric(random_root(rng)),
            _ => {
                let head = (0..rng.gen_range(1..=3usize)).map(|_| random_root(rng)).collect();
                let cycle = (0..rng.gen_range(1..=4usize)).map(|_| random_root(rng)).collect();
                Kappa::EventuallyPeriodic { head, cycle }
            }
        };
        kappa.insert(p, kap);
    }
    Ok(MultFunction::from_character(chi).modify_at_primes(kappa))
}

/// A small pool of bounded multiplicative functions for inequality batteries.
pub fn builder_pool(rng: &mut ChaCha8Rng) -> Result<Vec<MultFunction>> {
    let mut pool = vec![
        MultFunction::liouville(),
        MultFunction::loglog_phase(),
        MultFunction::damped(Frac::new(1, 2)),
        MultFunction::archimedean(0.7),
        MultFunction::liouville_like(PrimePredicate::Congruent { modulus: 4, residue: 1 }),
    ];
    for _ in 0..3 {
        pool.push(random_certified(rng)?);
    }
    Ok(pool)
}

pub fn suite_characters(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // complete multiplicativity on full tables
    let mut ok = true;
    for m in 1..=50u64 {
        for chi in enumerate_characters(m)? {
            for a in 0..m {
                for b in a..m {
                    if chi.eval(a * b) != chi.eval(a).mul(chi.eval(b)) {
                        ok = false;
                    }
                }
            }
        }
    }
    checks.push(check("table_multiplicativity_m_le_50", ok, "chi(ab)=chi(a)chi(b) exact".into()));

    // orthogonality, exactly
    let mut ok = true;
    for m in 2..=60u64 {
        for chi in enumerate_characters(m)? {
            if orthogonality_sum_is_zero(&chi) == chi.is_principal() {
                ok = false;
            }
        }
    }
    checks.push(check(
        "orthogonality_exact_m_le_60",
        ok,
        "period sum vanishes iff non-principal (multiset permutation proof)".into(),
    ));

    // conductor round-trip on primitive characters
    let mut ok = true;
    let mut tested = 0;
    for t in 1..=50u64 {
        for theta in enumerate_characters(t)? {
            if !is_primitive(&theta) {
                continue;
            }
            for mult in 1..=10u64 {
                let m = t * mult;
                if m > 500 {
                    continue;
                }
                let chi = induce(&theta, m)?;
                let (t2, theta2) = conductor(&chi);
                if t2 != t || theta2 != theta {
                    ok = false;
                }
                tested += 1;
            }
        }
    }
    checks.push(check(
        "conductor_round_trip",
        ok,
        format!("{tested} induce/conductor round trips up to modulus 500"),
    ));

    // two inducing characters coincide on the coprime classes of their lcm
    let mut ok = true;
    for _ in 0..100 {
        let t = rng.gen_range(1..=20u64);
        let chars = enumerate_characters(t)?;
        let theta = chars[rng.gen_range(0..chars.len())].clone();
        let m1 = t * rng.gen_range(1..=8u64);
        let m2 = t * rng.gen_range(1..=8u64);
        let chi1 = induce(&theta, m1)?;
        let chi2 = induce(&theta, m2)?;
        let l = arith::lcm_u64(m1, m2);
        for n in 1..=l.min(10_000) {
            if arith::gcd_u64(n, l) == 1 && chi1.eval(n) != chi2.eval(n) {
                ok = false;
            }
        }
    }
    checks.push(check(
        "inducing_pair_coincidence",
        ok,
        "100 random pairs agree on lcm-coprime residues".into(),
    ));

    Ok(SuiteReport { suite: "characters".into(), seed, checks })
}

pub fn suite_toeplitz(seed: u64, table: &PrimeTable) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let tol = crate::DEFAULT_TOLERANCE;

    // certificate soundness on random certified functions
    let mut ok = true;
    let mut pairs = 0u64;
    for _ in 0..10 {
        let f = random_certified(&mut rng)?;
        let cert = f.certificate().unwrap().clone();
        let n_max = 200_000.min(table.limit());
        let seq = crate::scan::value_scan(&f, table, n_max, tol)?;
        for _ in 0..200 {
            let n = rng.gen_range(1..=2000u64);
            let t_n = cert.certified_period(n);
            let mut s = 1;
            while n + s * t_n <= n_max && s <= 50 {
                if !seq.eq_at(n, n + s * t_n) {
                    ok = false;
                }
                pairs += 1;
                s += 1;
            }
        }
    }
    checks.push(check(
        "certificate_soundness",
        ok,
        format!("{pairs} certified-shift equalities hold exactly"),
    ));

    // position-1 lemma: 1 in Per_m forces the coprime classes to be
    // constant and nonvanishing
    let mut ok = true;
    for _ in 0..5 {
        let f = random_certified(&mut rng)?;
        let an = Analyzer::new(&f, table, 50_000, tol)?;
        let m1 = an.minimal_period_of_one(8)?;
        for n in 1..=5000u64 {
            if arith::gcd_u64(n, m1) == 1 {
                if !an.is_period_at(n, m1)?.is_verified() {
                    ok = false;
                }
                if f.evaluate(n, table)?.is_zero_exact() {
                    ok = false;
                }
            }
        }
    }
    checks.push(check(
        "period_of_one_propagates",
        ok,
        "coprime classes of m_1 verified constant and nonzero".into(),
    ));

    // complete multiplicativity on positions sharing a period
    let mut ok = true;
    for _ in 0..5 {
        let f = random_certified(&mut rng)?;
        let an = Analyzer::new(&f, table, 50_000, tol)?;
        let m1 = an.minimal_period_of_one(8)?;
        for _ in 0..100 {
            let n = rng.gen_range(1..=200u64);
            let k = rng.gen_range(1..=200u64);
            if n * k > 40_000 {
                continue;
            }
            let coprime_cond = arith::gcd_u64(arith::gcd_u64(n, k), m1) == 1;
            let both = an.is_period_at(n, m1)?.is_verified()
                && an.is_period_at(n * k, m1)?.is_verified();
            if coprime_cond && both {
                let lhs = f.evaluate(n * k, table)?;
                let rhs = f.evaluate(n, table)?.mul(f.evaluate(k, table)?);
                if !lhs.eq_within(&rhs, tol) {
                    ok = false;
                }
            }
        }
    }
    checks.push(check(
        "shared_period_multiplicativity",
        ok,
        "f(nk) = f(n) f(k) whenever n, nk share the period and gcd(n,k,m)=1".into(),
    ));

    // lcm-closure and monotonicity on the two reference examples
    let mut ok = true;
    let mut detail = String::new();
    {
        let ex = example_mod3();
        let an = Analyzer::new(&ex, table, 200_000, tol)?;
        let ps = an.period_structure(8)?;
        if !ps.lcm_closed {
            ok = false;
            detail = "example-mod3 essentials not lcm-closed".into();
        }
        // Per_m within Per_{km}
        for _ in 0..50 {
            let n = rng.gen_range(1..=1000u64);
            let m = rng.gen_range(1..=64u64);
            let k = rng.gen_range(1..=8u64);
            if an.is_period_at(n, m)?.is_verified() && !an.is_period_at(n, m * k)?.is_verified() {
                ok = false;
                detail = format!("monotonicity fails at n={n}, m={m}, k={k}");
            }
        }
    }
    checks.push(check("lcm_closure_and_monotonicity", ok, detail));

    // periodic round trip via the inverse construction
    let mut ok = true;
    for _ in 0..10 {
        let t_mod = rng.gen_range(1..=12u64);
        let chars = enumerate_characters(t_mod)?;
        let theta = chars[rng.gen_range(0..chars.len())].clone();
        let q = *[2u64, 5, 7].choose(&mut rng).unwrap();
        let b = rng.gen_range(1..=2u32);
        let head: Vec<Value> = (0..b).map(|_| random_root(&mut rng)).collect();
        let f = MultFunction::periodic_from_data(theta.clone(), vec![(q, b, head)])?;
        let an = Analyzer::new(&f, table, 100_000, tol)?;
        match an.classify_periodic(20_000)? {
            crate::toeplitz::PeriodicClass::Periodic { minimal_period, conductor: c, .. } => {
                let declared = q.pow(b) * t_mod;
                if declared % minimal_period != 0 {
                    ok = false;
                }
                let (t_in, _) = conductor(&theta);
                if c != t_in {
                    ok = false;
                }
            }
            _ => ok = false,
        }
    }
    checks.push(check(
        "periodic_round_trip",
        ok,
        "inverse construction is periodic with the declared period; conductor recovered".into(),
    ));

    Ok(SuiteReport { suite: "toeplitz".into(), seed, checks })
}

/// The worked example: chi mod 3 with the prime 2 remapped to 1.
pub fn example_mod3() -> MultFunction {
    let chi = enumerate_characters(3)
        .unwrap()
        .into_iter()
        .find(|c| !c.is_principal())
        .unwrap();
    MultFunction::from_character(chi)
        .modify_at_primes(BTreeMap::from([(2, Kappa::constant(Value::one()))]))
        .with_label("example_mod3")
}

/// The appendix example `h(n) = (-1)^{nu_2(n) + nu_3(n)}`.
pub fn example_h() -> MultFunction {
    let one = MultFunction::from_character(DirichletCharacter::principal(1));
    let f = one.modify_at_primes(BTreeMap::from([(2, Kappa::alternating())]));
    let g = one.modify_at_primes(BTreeMap::from([(3, Kappa::alternating())]));
    MultFunction::product(&f, &g).with_label("h_sign_nu2_nu3")
}

pub fn suite_pretense(seed: u64, table: &PrimeTable) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let cutoffs = [1000u64, 10_000, 100_000];

    // triangle inequality
    let pool = builder_pool(&mut rng)?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = &pool[rng.gen_range(0..pool.len())];
        let g = &pool[rng.gen_range(0..pool.len())];
        let h = &pool[rng.gen_range(0..pool.len())];
        for &x in &cutoffs {
            let dfh = pretense::distance_squared(f, h, x, table)?.max(0.0).sqrt();
            let dfg = pretense::distance_squared(f, g, x, table)?.max(0.0).sqrt();
            let dgh = pretense::distance_squared(g, h, x, table)?.max(0.0).sqrt();
            let slack = dfg + dgh - dfh;
            worst = worst.min(slack);
            if slack < -1e-9 {
                ok = false;
            }
        }
    }
    checks.push(check("triangle_inequality", ok, format!("worst slack {worst:.3e}")));

    // product inequality on windows
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g = &pool[rng.gen_range(0..pool.len())];
        let h = &pool[rng.gen_range(0..pool.len())];
        let g2 = &pool[rng.gen_range(0..pool.len())];
        let h2 = &pool[rng.gen_range(0..pool.len())];
        let (x, y) = (1000u64, 100_000u64);
        let lhs = pretense::windowed_distance(
            &MultFunction::product(g, g2),
            &MultFunction::product(h, h2),
            x,
            y,
            table,
        )?
        .max(0.0)
        .sqrt();
        let rhs = pretense::windowed_distance(g, h, x, y, table)?.max(0.0).sqrt()
            + pretense::windowed_distance(g2, h2, x, y, table)?.max(0.0).sqrt();
        let slack = rhs - lhs;
        worst = worst.min(slack);
        if slack < -1e-9 {
            ok = false;
        }
    }
    checks.push(check("product_inequality", ok, format!("worst slack {worst:.3e}")));

    // power inequality
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = &pool[rng.gen_range(0..pool.len())];
        let g = &pool[rng.gen_range(0..pool.len())];
        let m = rng.gen_range(2..=4u64);
        for &x in &cutoffs {
            let lhs = pretense::distance_squared(&f.power(m), &g.power(m), x, table)?
                .max(0.0)
                .sqrt();
            let rhs =
                m as f64 * pretense::distance_squared(f, g, x, table)?.max(0.0).sqrt();
            let slack = rhs - lhs;
            worst = worst.min(slack);
            if slack < -1e-9 {
                ok = false;
            }
        }
    }
    checks.push(check("power_inequality", ok, format!("worst slack {worst:.3e}")));

    // distance curves are nonnegative and nondecreasing
    let mut ok = true;
    for f in &pool {
        for g in &pool {
            let curve = pretense::distance_curve(f, g, &cutoffs, table)?;
            let mut last = 0.0;
            for &v in &curve.partial {
                if v < -1e-12 || v + 1e-12 < last {
                    ok = false;
                }
                last = v;
            }
        }
    }
    checks.push(check("curve_monotone", ok, "partial sums nonnegative, nondecreasing".into()));

    // certified pretender: distance to its character is eventually constant
    let mut ok = true;
    for _ in 0..5 {
        let f = random_certified(&mut rng)?;
        let cert = f.certificate().unwrap();
        let g = MultFunction::from_character(cert.chi.clone());
        let threshold = cert
            .modified
            .iter()
            .copied()
            .chain(arith::divisors(cert.chi.modulus()).into_iter().filter(|d| table.is_prime(*d)))
            .max()
            .unwrap_or(2);
        let d1 = pretense::distance_squared(&f, &g, threshold + 1, table)?;
        let d2 = pretense::distance_squared(&f, &g, 100_000, table)?;
        if (d1 - d2).abs() > 1e-12 {
            ok = false;
        }
    }
    checks.push(check(
        "certified_pretender_constancy",
        ok,
        "distance to the certificate character is constant past max(F, spec(d))".into(),
    ));

    Ok(SuiteReport { suite: "pretense".into(), seed, checks })
}

pub fn suite_dynamics(seed: u64, table: &PrimeTable) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // correlation with the singleton spec reduces to the mean, exactly
    let mut ok = true;
    for f in builder_pool(&mut rng)? {
        let n = 10_000;
        let vals = complex_scan(&f, table, n + 1)?;
        let spec =
            CorrelationSpec::new(vec![CorrFactor { shift: 0, power: 1, conjugate: false }])
                .unwrap();
        let c = dynamics::correlation_from(&vals, &spec, n);
        let m = dynamics::mean_from(&vals, n);
        if c != m {
            ok = false;
        }
    }
    checks.push(check("correlation_reduces_to_mean", ok, "bitwise equality".into()));

    // u1 square equals the average of the autocorrelations it uses
    let mut ok = true;
    {
        let f = MultFunction::liouville();
        let (n, h) = (100_000u64, 100u64);
        let vals = complex_scan(&f, table, n + h)?;
        let direct = dynamics::ghk_u1_square(&vals, n, h);
        let mut acc = arith::Kahan::new();
        for hh in 1..=h {
            acc.add(dynamics::spectral_coefficient_from(&vals, hh, n, true).re);
        }
        if direct != acc.value() / h as f64 {
            ok = false;
        }
    }
    checks.push(check("u1_internal_identity", ok, "same code path, bitwise equal".into()));

    // rap error does not increase when the period is replaced by a multiple
    let mut ok = true;
    for f in [MultFunction::liouville(), example_mod3(), example_h()] {
        let n = 100_000;
        let vals = complex_scan(&f, table, n)?;
        for q in [3u64, 6, 12] {
            let e1 = dynamics::rap_error_from(&vals, q, n)?;
            let e2 = dynamics::rap_error_from(&vals, 2 * q, n)?;
            if e2 > e1 + 1e-9 {
                ok = false;
            }
        }
    }
    checks.push(check("rap_error_monotone_under_refinement", ok, String::new()));

    // real-valued functions give real correlations
    let mut ok = true;
    {
        let f = MultFunction::liouville();
        let n = 100_000;
        let spec = CorrelationSpec::pair();
        let vals = complex_scan(&f, table, n + 1)?;
        let c = dynamics::correlation_from(&vals, &spec, n);
        if c.im.abs() > 1e-12 {
            ok = false;
        }
    }
    checks.push(check("real_function_real_correlation", ok, String::new()));

    // progression means of Liouville-like builders trend to zero
    let mut ok = true;
    let mut detail = String::new();
    {
        let f = MultFunction::liouville_like(PrimePredicate::Congruent { modulus: 4, residue: 1 });
        for (a, r) in [(1u64, 1u64), (3, 2)] {
            let n_large = ((table.limit() - r) / a).min(1_000_000);
            let m_small = dynamics::mean_progression(&f, a, r, 10_000, table)?.norm();
            let m_large = dynamics::mean_progression(&f, a, r, n_large, table)?.norm();
            if m_large > m_small + 0.02 || m_large > 0.25 {
                ok = false;
                detail = format!("a={a}, r={r}: {m_small:.4} -> {m_large:.4}");
            }
        }
    }
    checks.push(check("liouville_like_progression_trend", ok, detail));

    Ok(SuiteReport { suite: "dynamics".into(), seed, checks })
}

use dynamics::CorrFactor;

/// Runs a named suite (or `all`).
pub fn run_suite(name: &str, seed: u64, table: &PrimeTable) -> Result<Vec<SuiteReport>> {
    match name {
        "characters" => Ok(vec![suite_characters(seed)?]),
        "toeplitz" => Ok(vec![suite_toeplitz(seed, table)?]),
        "pretense" => Ok(vec![suite_pretense(seed, table)?]),
        "dynamics" => Ok(vec![suite_dynamics(seed, table)?]),
        "all" => Ok(vec![
            suite_characters(seed)?,
            suite_toeplitz(seed, table)?,
            suite_pretense(seed, table)?,
            suite_dynamics(seed, table)?,
        ]),
        other => Err(crate::Error::Argument(format!("unknown suite '{other}'"))),
    }
}

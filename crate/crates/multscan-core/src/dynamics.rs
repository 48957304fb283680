//! Empirical dynamical statistics. Every quantity here is a finite-N
//! estimate of a limit; reports carry the parameters and, where the spec of
//! an estimator demands it, multi-N series, so nothing is mistaken for the
//! limit itself.

use crate::arith::{Kahan, PrimeTable};
use crate::characters::DirichletCharacter;
use crate::multfun::MultFunction;
use crate::scan::complex_scan;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

/// A shifted-product correlation specification:
/// `prod over j of f(n + shift_j)^{power_j}` with optional conjugation per
/// factor.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationSpec {
    pub factors: Vec<CorrFactor>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorrFactor {
    pub shift: u64,
    pub power: u32,
    pub conjugate: bool,
}

impl CorrelationSpec {
    pub fn new(factors: Vec<CorrFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Argument("at least one factor required".into()));
        }
        for w in factors.windows(2) {
            if w[0].shift >= w[1].shift {
                return Err(Error::Argument("shifts must be strictly increasing".into()));
            }
        }
        if factors.iter().any(|f| f.power == 0) {
            return Err(Error::Argument("powers must be >= 1".into()));
        }
        Ok(CorrelationSpec { factors })
    }

    /// `f(n) f(n+1)`-type pair spec.
    pub fn pair() -> Self {
        CorrelationSpec {
            factors: vec![
                CorrFactor { shift: 0, power: 1, conjugate: false },
                CorrFactor { shift: 1, power: 1, conjugate: false },
            ],
        }
    }

    pub fn max_shift(&self) -> u64 {
        self.factors.iter().map(|f| f.shift).max().unwrap_or(0)
    }
}

/// An indexed numeric series with its parameters (the universal report
/// carrier for multi-N estimates).
#[derive(Clone, Debug, Serialize)]
pub struct ScanSeries {
    pub parameter: String,
    pub label: String,
    pub points: Vec<(u64, [f64; 2])>,
}

impl ScanSeries {
    pub fn new(parameter: impl Into<String>, label: impl Into<String>) -> Self {
        ScanSeries { parameter: parameter.into(), label: label.into(), points: Vec::new() }
    }

    pub fn push(&mut self, x: u64, v: Complex64) {
        let x_ok = self.points.last().map(|(last, _)| *last < x).unwrap_or(true);
        debug_assert!(x_ok, "parameter values must increase");
        self.points.push((x, [v.re, v.im]));
    }
}

fn kahan_complex_mean<I: Iterator<Item = Complex64>>(iter: I, n: u64) -> Complex64 {
    let mut re = Kahan::new();
    let mut im = Kahan::new();
    for z in iter {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value()) / n as f64
}

/// `(1/N) sum over n in [1, N] of f(n)` from a scanned value array.
pub fn mean_from(vals: &[Complex64], n: u64) -> Complex64 {
    kahan_complex_mean((1..=n as usize).map(|i| vals[i]), n)
}

/// `(1/N) sum over 0 <= j < N of f(a j + r)`.
pub fn mean_progression(
    f: &MultFunction,
    a: u64,
    r: u64,
    n: u64,
    table: &PrimeTable,
) -> Result<Complex64> {
    if a == 0 || r == 0 {
        return Err(Error::Argument("need a >= 1 and r >= 1".into()));
    }
    let top = a * (n - 1) + r;
    let vals = complex_scan(f, table, top)?;
    Ok(kahan_complex_mean((0..n).map(|j| vals[(a * j + r) as usize]), n))
}

pub fn mean(f: &MultFunction, n: u64, table: &PrimeTable) -> Result<Complex64> {
    let vals = complex_scan(f, table, n)?;
    Ok(mean_from(&vals, n))
}

/// `(1/N) sum over n in [1, N] of prod_j g_j(n + b_j)` where
/// `g_j = f^{a_j}` optionally conjugated. `vals` must cover
/// `N + max shift`.
pub fn correlation_from(vals: &[Complex64], spec: &CorrelationSpec, n: u64) -> Complex64 {
    debug_assert!(vals.len() as u64 > n + spec.max_shift());
    kahan_complex_mean(
        (1..=n).map(|i| {
            let mut prod = Complex64::new(1.0, 0.0);
            for fac in &spec.factors {
                let mut z = vals[(i + fac.shift) as usize];
                if fac.conjugate {
                    z = z.conj();
                }
                prod *= z.powi(fac.power as i32);
            }
            prod
        }),
        n,
    )
}

pub fn correlation(
    f: &MultFunction,
    spec: &CorrelationSpec,
    n: u64,
    table: &PrimeTable,
) -> Result<Complex64> {
    let vals = complex_scan(f, table, n + spec.max_shift())?;
    Ok(correlation_from(&vals, spec, n))
}

/// Correlation values at several N plus the maximal pairwise distance among
/// them. A small diagnostic is consistent with convergence; the sampling is
/// finite, so neither outcome is a proof about the limit (the paper's limit
/// quantifies over all subsequences).
#[derive(Clone, Debug, Serialize)]
pub struct NonconvergenceReport {
    pub series: Vec<(u64, [f64; 2])>,
    pub max_pairwise_distance: f64,
    pub note: String,
}

pub fn nonconvergence_diagnostic(
    f: &MultFunction,
    spec: &CorrelationSpec,
    n_list: &[u64],
    table: &PrimeTable,
) -> Result<NonconvergenceReport> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let top = ns.last().copied().ok_or_else(|| Error::Argument("empty N list".into()))?;
    let vals = complex_scan(f, table, top + spec.max_shift())?;
    let series: Vec<(u64, Complex64)> =
        ns.iter().map(|&n| (n, correlation_from(&vals, spec, n))).collect();
    let mut max_pairwise: f64 = 0.0;
    for i in 0..series.len() {
        for j in i + 1..series.len() {
            max_pairwise = max_pairwise.max((series[i].1 - series[j].1).norm());
        }
    }
    Ok(NonconvergenceReport {
        series: series.into_iter().map(|(n, z)| (n, [z.re, z.im])).collect(),
        max_pairwise_distance: max_pairwise,
        note: "finite-N sample; the underlying limit quantifies over all subsequences".into(),
    })
}

/// `(1/N) sum f(n) f(n+k)` (plain) or `(1/N) sum f(n) conj(f(n+k))`
/// (autocorrelation variant). `vals` must cover `N + k`.
pub fn spectral_coefficient_from(
    vals: &[Complex64],
    k: u64,
    n: u64,
    autocorrelation: bool,
) -> Complex64 {
    kahan_complex_mean(
        (1..=n).map(|i| {
            let w = vals[(i + k) as usize];
            vals[i as usize] * if autocorrelation { w.conj() } else { w }
        }),
        n,
    )
}

pub fn spectral_coefficient(
    f: &MultFunction,
    k: u64,
    n: u64,
    autocorrelation: bool,
    table: &PrimeTable,
) -> Result<Complex64> {
    let vals = complex_scan(f, table, n + k)?;
    Ok(spectral_coefficient_from(&vals, k, n, autocorrelation))
}

/// First Gowers-type seminorm estimate:
/// `sqrt(max(0, Re (1/H) sum over h <= H of autocorrelation(h)))`.
/// The square equals, bit for bit, the average of
/// [`spectral_coefficient_from`] autocorrelations.
pub fn ghk_u1_from(vals: &[Complex64], n: u64, h_max: u64) -> f64 {
    ghk_u1_square(vals, n, h_max).max(0.0).sqrt()
}

/// The pre-clamp squared u1 average (exposed for the internal-consistency
/// identity between code paths).
pub fn ghk_u1_square(vals: &[Complex64], n: u64, h_max: u64) -> f64 {
    let mut re = Kahan::new();
    for h in 1..=h_max {
        re.add(spectral_coefficient_from(vals, h, n, true).re);
    }
    re.value() / h_max as f64
}

pub fn ghk_u1(f: &MultFunction, n: u64, h_max: u64, table: &PrimeTable) -> Result<f64> {
    let vals = complex_scan(f, table, n + h_max)?;
    Ok(ghk_u1_from(&vals, n, h_max))
}

/// Second Gowers-type seminorm estimate via the recursion
/// `u2^4 = (1/H) sum over h of u1^2 of (f(.+h) conj(f))`, inner averages at
/// the same `(N, H)`. `vals` must cover `N + 2H`.
pub fn ghk_u2_from(vals: &[Complex64], n: u64, h_max: u64) -> f64 {
    let h_usable = n as usize + h_max as usize; // g_h defined on [1, N + H]
    let partials: Vec<f64> = (1..=h_max)
        .collect::<Vec<_>>()
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = Kahan::new();
            for &h in chunk {
                // g(n) = f(n+h) conj(f(n)) for n in [1, N+H]
                let g: Vec<Complex64> = (0..=h_usable)
                    .map(|i| {
                        if i == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            vals[i + h as usize] * vals[i].conj()
                        }
                    })
                    .collect();
                // window sums W(n) = sum over h' in [1, H] of g(n + h')
                let mut inner = Kahan::new();
                let mut window = Complex64::new(0.0, 0.0);
                for i in 1..=h_max as usize {
                    window += g[i];
                }
                for i in 1..=n as usize {
                    // W(i) = g[i+1] + ... + g[i+H]
                    window += g[i + h_max as usize] - g[i];
                    inner.add((g[i] * window.conj()).re);
                }
                acc.add((inner.value() / n as f64 / h_max as f64).max(0.0));
            }
            acc.value()
        })
        .collect();
    let mut total = Kahan::new();
    for v in partials {
        total.add(v);
    }
    (total.value() / h_max as f64).max(0.0).powf(0.25)
}

pub fn ghk_u2(f: &MultFunction, n: u64, h_max: u64, table: &PrimeTable) -> Result<f64> {
    let vals = complex_scan(f, table, n + 2 * h_max)?;
    Ok(ghk_u2_from(&vals, n, h_max))
}

/// L1-optimal q-periodic approximation error: per residue class the
/// geometric median of the class values (the Besicovitch-error minimiser),
/// then the mean absolute deviation.
pub fn rap_error_from(vals: &[Complex64], q: u64, n: u64) -> Result<f64> {
    if q == 0 || q > n / 10 {
        return Err(Error::Argument(format!("period {q} too large for N={n} (need q <= N/10)")));
    }
    let mut err = Kahan::new();
    for r in 1..=q {
        let points: Vec<Complex64> =
            (0..).map(|s| r + s * q).take_while(|&x| x <= n).map(|x| vals[x as usize]).collect();
        let center = geometric_median(&points, 1e-10);
        for p in &points {
            err.add((p - center).norm());
        }
    }
    Ok(err.value() / n as f64)
}

pub fn rap_error(f: &MultFunction, q: u64, n: u64, table: &PrimeTable) -> Result<f64> {
    let vals = complex_scan(f, table, n)?;
    rap_error_from(&vals, q, n)
}

pub fn best_rap_error(
    f: &MultFunction,
    q_list: &[u64],
    n: u64,
    table: &PrimeTable,
) -> Result<(u64, f64)> {
    let vals = complex_scan(f, table, n)?;
    let mut best: Option<(u64, f64)> = None;
    for &q in q_list {
        let e = rap_error_from(&vals, q, n)?;
        if best.map(|(_, b)| e < b).unwrap_or(true) {
            best = Some((q, e));
        }
    }
    best.ok_or_else(|| Error::Argument("empty period list".into()))
}

/// Geometric median by iterative reweighting, to the given displacement
/// tolerance. Coinciding points are compressed to a weighted support set
/// first; the functions scanned here take few distinct values, which turns
/// the hot path into a small weighted iteration.
pub fn geometric_median(points: &[Complex64], tol: f64) -> Complex64 {
    assert!(!points.is_empty());
    let mut support: std::collections::HashMap<(u64, u64), (Complex64, f64)> =
        std::collections::HashMap::new();
    for p in points {
        support
            .entry((p.re.to_bits(), p.im.to_bits()))
            .and_modify(|e| e.1 += 1.0)
            .or_insert((*p, 1.0));
    }
    if support.len() == 1 {
        return points[0];
    }
    let mut pts: Vec<(Complex64, f64)> = support.into_values().collect();
    pts.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    let total: f64 = pts.iter().map(|(_, w)| w).sum();
    let mut y = pts.iter().map(|(p, w)| p * *w).sum::<Complex64>() / total;
    for _ in 0..500 {
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for (p, w) in &pts {
            let d = (p - y).norm().max(1e-14);
            num += w * p / d;
            den += w / d;
        }
        let next = num / den;
        let shift = (next - y).norm();
        y = next;
        if shift <= tol * (1.0 + y.norm()) {
            break;
        }
    }
    y
}

/// Local factor report: product of
/// `1 - 2/p + (1 - 1/p) * 2 * sum over j >= 1 of F(p^j)/p^j` with
/// `F(p^j) = f(p^j) conj(chi(p^j))` over primes `p <= cutoff` coprime to
/// `a * modulus`; the series is truncated at `p^j <= series_limit` and the
/// truncation tail bound is recorded.
#[derive(Clone, Debug, Serialize)]
pub struct LocalFactorReport {
    pub product: [f64; 2],
    pub factors: u64,
    pub excluded_primes: Vec<u64>,
    pub tail_bound: f64,
}

pub fn local_factor_product(
    f: &MultFunction,
    chi: &DirichletCharacter,
    a_shift: u64,
    p_cutoff: u64,
    table: &PrimeTable,
) -> Result<LocalFactorReport> {
    if a_shift == 0 {
        return Err(Error::Argument("shift must be >= 1".into()));
    }
    if p_cutoff > table.limit() {
        return Err(Error::OutOfRange("cutoff exceeds sieve limit".into()));
    }
    let series_limit = table.limit();
    let mut product = Complex64::new(1.0, 0.0);
    let mut factors = 0u64;
    let mut excluded = Vec::new();
    let mut tail = Kahan::new();
    for &p in table.primes_between(2, p_cutoff) {
        let p = p as u64;
        if a_shift % p == 0 || chi.modulus() % p == 0 {
            excluded.push(p);
            continue;
        }
        let pf = p as f64;
        let mut series_re = Kahan::new();
        let mut series_im = Kahan::new();
        let mut pj = p;
        let mut j = 1u64;
        loop {
            let fv = f.prime_power_value(p, j).to_complex();
            let cv = chi.eval_prime_power(p, j).to_complex().conj();
            let term = fv * cv / pj as f64;
            series_re.add(term.re);
            series_im.add(term.im);
            match pj.checked_mul(p) {
                Some(next) if next <= series_limit => {
                    pj = next;
                    j += 1;
                }
                _ => {
                    tail.add(2.0 / (pj as f64 * pf));
                    break;
                }
            }
        }
        let series = Complex64::new(series_re.value(), series_im.value());
        let factor = Complex64::new(1.0 - 2.0 / pf, 0.0) + (1.0 - 1.0 / pf) * 2.0 * series;
        product *= factor;
        factors += 1;
    }
    Ok(LocalFactorReport {
        product: [product.re, product.im],
        factors,
        excluded_primes: excluded,
        tail_bound: tail.value(),
    })
}

/// Local 1-Fourier-uniformity estimate:
/// `(1/M) sum over m of sup over an alpha grid of
/// |(1/H) sum over h < H of f(m+h) e^{2 pi i h alpha}|`.
/// The grid sup (grid size >= 4H, rounded up to a power of two) is a lower
/// bound on the true sup; the Bernstein-type gap factor is recorded.
#[derive(Clone, Debug, Serialize)]
pub struct L1fuReport {
    pub value: f64,
    pub m_count: u64,
    pub h_len: u64,
    pub grid_size: usize,
    /// multiply `value` by this to dominate the true sup average
    pub bernstein_gap_factor: f64,
}

pub fn l1fu_estimate(
    f: &MultFunction,
    m_count: u64,
    h_len: u64,
    alpha_grid_size: usize,
    table: &PrimeTable,
) -> Result<L1fuReport> {
    let vals = complex_scan(f, table, m_count + h_len)?;
    l1fu_estimate_from_values(&vals, m_count, h_len, alpha_grid_size)
}

pub fn l1fu_estimate_from_values(
    vals: &[Complex64],
    m_count: u64,
    h_len: u64,
    alpha_grid_size: usize,
) -> Result<L1fuReport> {
    if (alpha_grid_size as u64) < 4 * h_len {
        return Err(Error::Argument("alpha grid must have at least 4H points".into()));
    }
    let grid = alpha_grid_size.next_power_of_two();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(grid);
    let partials: Vec<f64> = (1..=m_count)
        .collect::<Vec<_>>()
        .par_chunks(1024)
        .map(|chunk| {
            let mut buf = vec![Complex64::new(0.0, 0.0); grid];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let mut acc = Kahan::new();
            for &m in chunk {
                buf.fill(Complex64::new(0.0, 0.0));
                for h in 0..h_len as usize {
                    buf[h] = vals[m as usize + h];
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                let sup = buf.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
                acc.add(sup / h_len as f64);
            }
            acc.value()
        })
        .collect();
    let mut total = Kahan::new();
    for v in partials {
        total.add(v);
    }
    let gap = std::f64::consts::PI * (h_len.saturating_sub(1)) as f64 / grid as f64;
    Ok(L1fuReport {
        value: total.value() / m_count as f64,
        m_count,
        h_len,
        grid_size: grid,
        bernstein_gap_factor: if gap < 1.0 { 1.0 / (1.0 - gap) } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve;
    use crate::characters::enumerate_characters;
    use crate::multfun::Kappa;
    use crate::value::Value;
    use crate::verify::example_mod3;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn table() -> PrimeTable {
        sieve(1_100_000).unwrap()
    }

    fn chi3() -> DirichletCharacter {
        enumerate_characters(3).unwrap().into_iter().find(|c| !c.is_principal()).unwrap()
    }

    #[test]
    fn mean_examples() {
        let t = table();
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        assert!((mean(&one, 10_000, &t).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        // non-principal character: period sums vanish, |mean| <= 3/N
        let f = MultFunction::from_character(chi3());
        for n in [999u64, 1000, 10_000] {
            let m = mean(&f, n, &t).unwrap().norm();
            assert!(m <= 3.0 / n as f64 + 1e-12, "n={n}: {m}");
        }

        // liouville mean at 1e6 is tiny
        let l = MultFunction::liouville();
        let m = mean(&l, 1_000_000, &t).unwrap().norm();
        assert!(m < 0.005, "{m}");
    }

    #[test]
    fn progression_mean_examples() {
        let t = table();
        let f = MultFunction::from_character(chi3());
        // along 3j + 3 the character vanishes identically
        let m = mean_progression(&f, 3, 3, 1000, &t).unwrap();
        assert_eq!(m, Complex64::new(0.0, 0.0));
        // along 3j + 1 it is constantly chi(1) = 1
        let m2 = mean_progression(&f, 3, 1, 1000, &t).unwrap();
        assert!((m2 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn correlation_pair_reduction_and_reality() {
        let t = table();
        let l = MultFunction::liouville();
        let n = 100_000u64;
        let vals = complex_scan(&l, &t, n + 1).unwrap();
        let single =
            CorrelationSpec::new(vec![CorrFactor { shift: 0, power: 1, conjugate: false }])
                .unwrap();
        assert_eq!(correlation_from(&vals, &single, n), mean_from(&vals, n));
        let pair = CorrelationSpec::pair();
        let c = correlation_from(&vals, &pair, n);
        assert!(c.im.abs() < 1e-12);
        assert!(c.norm() < 0.02, "liouville pair correlation {c}");
    }

    #[test]
    fn perturbed_archimedean_pair_correlation() {
        // f(n) f(n+1) ~ -(1/N) sum n^{2it}; both sides computed numerically
        let t = table();
        let t0 = 1.0;
        let f = MultFunction::archimedean(t0).modify_at_primes(BTreeMap::from([(
            2,
            Kappa::Scaled {
                scale: Value::minus_one(),
                ratio: Value::approx(Complex64::from_polar(1.0, t0 * 2f64.ln())),
            },
        )]));
        let n = 1_000_000u64;
        let vals = complex_scan(&f, &t, n + 1).unwrap();
        let corr = correlation_from(&vals, &CorrelationSpec::pair(), n);
        let mut power_mean = Kahan::new();
        let mut power_mean_im = Kahan::new();
        for j in 1..=n {
            let z = Complex64::from_polar(1.0, 2.0 * t0 * (j as f64).ln());
            power_mean.add(z.re);
            power_mean_im.add(z.im);
        }
        let rhs = -Complex64::new(power_mean.value(), power_mean_im.value()) / n as f64;
        assert!((corr - rhs).norm() < 0.01, "corr={corr}, -mean n^2it={rhs}");
        // and the Archimedean mean itself oscillates: closed form
        // (1/N) sum n^{2it} ~ N^{2it} / (1 + 2it)
        let closed = Complex64::from_polar(1.0, 2.0 * t0 * (n as f64).ln())
            / Complex64::new(1.0, 2.0 * t0);
        assert!((-rhs - closed).norm() < 0.01, "closed-form check");
    }

    #[test]
    fn nonconvergence_diagnostics() {
        let t = table();
        // certified function: small drift
        let f = example_mod3();
        let rep =
            nonconvergence_diagnostic(&f, &CorrelationSpec::pair(), &[10_000, 100_000, 1_000_000], &t)
                .unwrap();
        assert!(rep.max_pairwise_distance < 0.02, "{}", rep.max_pairwise_distance);

        // perturbed Archimedean: large drift across a factor e^{2 pi}
        let t0 = 1.0;
        let g = MultFunction::archimedean(t0).modify_at_primes(BTreeMap::from([(
            2,
            Kappa::Scaled {
                scale: Value::minus_one(),
                ratio: Value::approx(Complex64::from_polar(1.0, t0 * 2f64.ln())),
            },
        )]));
        let n0 = 1500u64;
        let n_list: Vec<u64> = (0..=4)
            .map(|k| (n0 as f64 * (std::f64::consts::PI * k as f64 / 2.0).exp()) as u64)
            .collect();
        let rep2 = nonconvergence_diagnostic(&g, &CorrelationSpec::pair(), &n_list, &t).unwrap();
        assert!(rep2.max_pairwise_distance > 0.05, "{}", rep2.max_pairwise_distance);

        // constant function: zero drift
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let rep3 =
            nonconvergence_diagnostic(&one, &CorrelationSpec::pair(), &[100, 1000], &t).unwrap();
        assert_eq!(rep3.max_pairwise_distance, 0.0);
    }

    #[test]
    fn spectral_coefficients() {
        let t = table();
        let l = MultFunction::liouville();
        let n = 1_000_000u64;
        let vals = complex_scan(&l, &t, n + 3).unwrap();
        // k = 0 autocorrelation of a unimodular function is 1
        assert!((spectral_coefficient_from(&vals, 0, n, true).re - 1.0).abs() < 1e-12);
        // |corr at k=1| small
        assert!(spectral_coefficient_from(&vals, 1, n, false).norm() < 0.01);

        // non-principal chi mod 3 autocorrelation at k = 3 is the density 2/3
        let f = MultFunction::from_character(chi3());
        let cvals = complex_scan(&f, &t, n + 3).unwrap();
        let c = spectral_coefficient_from(&cvals, 3, n, true);
        assert!((c.re - 2.0 / 3.0).abs() < 3.0 / n as f64 + 1e-9, "{c}");
    }

    #[test]
    fn ghk_u1_values() {
        let t = table();
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let vals = complex_scan(&one, &t, 10_999).unwrap();
        assert_eq!(ghk_u1_from(&vals, 10_000, 999), 1.0);

        // non-principal chi mod 3 through H divisible by 3: vanishing u1
        let f = MultFunction::from_character(chi3());
        let n = 1_000_000u64;
        let fvals = complex_scan(&f, &t, n + 999).unwrap();
        let u1 = ghk_u1_from(&fvals, n, 999);
        assert!(u1 < 0.05, "u1 = {u1}");

        let l = MultFunction::liouville();
        let lvals = complex_scan(&l, &t, n + 999).unwrap();
        let u1l = ghk_u1_from(&lvals, n, 999);
        assert!(u1l < 0.05, "liouville u1 = {u1l}");
    }

    #[test]
    fn ghk_u2_detects_structure() {
        let t = table();
        let f = MultFunction::from_character(chi3());
        let n = 100_000u64;
        let h = 120u64;
        let vals = complex_scan(&f, &t, n + 2 * h).unwrap();
        let u2 = ghk_u2_from(&vals, n, h);
        // oracle: periodic structure keeps u2 well above zero
        assert!(u2 > 0.3, "u2 = {u2}");
        // and u2 >= u1 behaviour: u1 vanishes here while u2 does not
        let u1 = ghk_u1_from(&vals, n, h);
        assert!(u1 < 0.1);
    }

    #[test]
    fn rap_errors() {
        let t = table();
        // chi mod 3 approximated with period 3: error O(1/N)
        let f = MultFunction::from_character(chi3());
        let n = 100_000u64;
        let e = rap_error(&f, 3, n, &t).unwrap();
        assert!(e < 10.0 / n as f64, "{e}");

        // liouville: any small period leaves error near 1
        let l = MultFunction::liouville();
        let lvals = complex_scan(&l, &t, 1_000_000).unwrap();
        for q in [2u64, 17, 100] {
            let e = rap_error_from(&lvals, q, 1_000_000).unwrap();
            assert!(e >= 0.99, "q={q}: {e}");
        }

        // certified function: error decreasing along q = 3 * 2^j
        let ex = example_mod3();
        let exvals = complex_scan(&ex, &t, 1_000_000).unwrap();
        let qs: Vec<u64> = (0..=6).map(|j| 3 * (1u64 << j)).collect();
        let errs: Vec<f64> =
            qs.iter().map(|&q| rap_error_from(&exvals, q, 1_000_000).unwrap()).collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{errs:?}");
        }
        assert!(errs.last().unwrap() < &0.02, "{errs:?}");
        let (qbest, ebest) = best_rap_error(&ex, &qs, 1_000_000, &t).unwrap();
        assert_eq!(qbest, *qs.last().unwrap());
        assert!((ebest - errs.last().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn geometric_median_properties() {
        // all-equal cluster returns the point
        let pts = vec![Complex64::new(0.5, -0.25); 40];
        assert_eq!(geometric_median(&pts, 1e-10), Complex64::new(0.5, -0.25));
        // two clusters: median sits at the heavier one
        let mut pts = vec![Complex64::new(1.0, 0.0); 70];
        pts.extend(vec![Complex64::new(-1.0, 0.0); 30]);
        let m = geometric_median(&pts, 1e-10);
        assert!((m - Complex64::new(1.0, 0.0)).norm() < 1e-6, "{m}");
    }

    #[test]
    fn local_factors() {
        let t = table();
        // f = chi: every factor is exactly 1 up to series truncation
        let chi = chi3();
        let f = MultFunction::from_character(chi.clone());
        let rep = local_factor_product(&f, &chi, 1, 10_000, &t).unwrap();
        let prod = Complex64::new(rep.product[0], rep.product[1]);
        // each complete factor is exactly 1; the deviation is the recorded
        // series-truncation tail
        assert!(
            (prod - Complex64::new(1.0, 0.0)).norm() <= rep.tail_bound + 1e-9,
            "{prod} vs tail {}",
            rep.tail_bound
        );
        assert!(rep.tail_bound < 1e-3);
        assert!(rep.excluded_primes == vec![3]);

        // certified function: factors differ from 1 only on the modified set
        let ex = example_mod3();
        let rep_small = local_factor_product(&ex, &chi, 1, 4, &t).unwrap();
        let rep_large = local_factor_product(&ex, &chi, 1, 10_000, &t).unwrap();
        let ps = Complex64::new(rep_small.product[0], rep_small.product[1]);
        let pl = Complex64::new(rep_large.product[0], rep_large.product[1]);
        let slack = rep_small.tail_bound + rep_large.tail_bound + 1e-9;
        assert!((ps - pl).norm() <= slack, "converged by 2*max(F): {ps} vs {pl} (slack {slack})");

        // factor magnitudes obey the crude bound
        for &p in t.primes_between(2, 100) {
            let p = p as u64;
            if p == 3 {
                continue;
            }
            let one_p = local_factor_product(&f, &chi, 1, p, &t).unwrap();
            let prod = Complex64::new(one_p.product[0], one_p.product[1]);
            assert!(prod.norm() <= (1.0f64 + 4.0 / 2.0).powi(one_p.factors as i32));
        }
    }

    #[test]
    fn l1fu_values() {
        let t = table();
        // constant function: sup attained at alpha = 0, estimate 1
        let one = MultFunction::from_character(DirichletCharacter::principal(1));
        let rep = l1fu_estimate(&one, 2000, 64, 256, &t).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9, "{}", rep.value);

        // chi mod 3: stays above 0.3 (pretentious functions keep local
        // Fourier mass)
        let f = MultFunction::from_character(chi3());
        for h in [100u64, 1000] {
            let rep = l1fu_estimate(&f, 20_000, h, (4 * h) as usize, &t).unwrap();
            assert!(rep.value > 0.3, "H={h}: {}", rep.value);
        }

        // random signs decay like sqrt(log H / H)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<Complex64> = (0..30_000)
            .map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let r100 = l1fu_estimate_from_values(&vals, 20_000, 100, 400).unwrap();
        let r1000 = l1fu_estimate_from_values(&vals, 20_000, 1000, 4000).unwrap();
        assert!(r1000.value < r100.value);
        let model = |h: f64| (h.ln() / h).sqrt();
        assert!(r100.value < 3.0 * model(100.0), "{}", r100.value);
        assert!(r1000.value < 3.0 * model(1000.0), "{}", r1000.value);
        assert!(r100.value > 0.5 * model(100.0));
    }

    #[test]
    fn spec_validation() {
        assert!(CorrelationSpec::new(vec![]).is_err());
        assert!(CorrelationSpec::new(vec![
            CorrFactor { shift: 1, power: 1, conjugate: false },
            CorrFactor { shift: 1, power: 1, conjugate: false },
        ])
        .is_err());
        assert!(CorrelationSpec::new(vec![CorrFactor { shift: 0, power: 0, conjugate: false }])
            .is_err());
    }
}

//! Fourier coefficients of `g = exp(α sin x sin y)` and `1/g`, by exact series
//! and by FFT, with the parity law and the factorial decay bound.
//!
//! With `e^{i(kx+ly)}` normalisation,
//! `a_{k,l} = (−1)^{(k+l)/2} Σ_n αⁿ/(n! 4ⁿ) C(n, (n+k)/2) C(n, (n+l)/2)`
//! over `n ≥ L = max(|k|, |l|)` with `n ≡ k (mod 2)`; all terms share one
//! sign. Consecutive terms `b_j` (`n = L + 2j`) obey
//! `|b_{j+1}/b_j| = α²(n+1)(n+2) / (16 (m_k+1)(n−m_k+1)(m_l+1)(n−m_l+1))`,
//! which is at most `α²/(4(j+1)²)`; that bound certifies the truncation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::torus::fft::Fft2;

/// Relative truncation error the series must certify.
pub const CERTIFY_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffSource {
    Series,
    Fft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffTarget {
    Metric,
    InverseMetric,
}

impl CoeffTarget {
    fn signed_alpha(self, alpha: f64) -> f64 {
        match self {
            CoeffTarget::Metric => alpha,
            CoeffTarget::InverseMetric => -alpha,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub k_max: usize,
    pub alpha: f64,
    pub source: CoeffSource,
    pub target: CoeffTarget,
    a: Vec<Complex64>,
}

impl CoeffTable {
    fn zeros(k_max: usize, alpha: f64, source: CoeffSource, target: CoeffTarget) -> Self {
        let w = 2 * k_max + 1;
        Self { k_max, alpha, source, target, a: vec![Complex64::default(); w * w] }
    }

    fn index(&self, k: i64, l: i64) -> usize {
        let km = self.k_max as i64;
        assert!(k.abs() <= km && l.abs() <= km, "({k}, {l}) outside |k|,|l| <= {km}");
        ((l + km) * (2 * km + 1) + (k + km)) as usize
    }

    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        self.a[self.index(k, l)]
    }

    fn set(&mut self, k: i64, l: i64, z: Complex64) {
        let i = self.index(k, l);
        self.a[i] = z;
    }

    /// All `(k, l, a)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let km = self.k_max as i64;
        (-km..=km).flat_map(move |l| (-km..=km).map(move |k| (k, l, self.get(k, l))))
    }

    /// Largest `|a|` over entries whose indices have different parities.
    pub fn parity_violation(&self) -> f64 {
        self.entries().filter(|&(k, l, _)| (k - l).rem_euclid(2) == 1).map(|(_, _, z)| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_difference(&self, other: &CoeffTable) -> f64 {
        let km = self.k_max.min(other.k_max) as i64;
        let mut d: f64 = 0.0;
        for l in -km..=km {
            for k in -km..=km {
                d = d.max((self.get(k, l) - other.get(k, l)).norm());
            }
        }
        d
    }
}

/// `ln n!` for `n ≤ n_max` with compensated summation.
fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let (mut s, mut c) = (0.0f64, 0.0f64);
    out.push(0.0);
    for n in 1..=n_max {
        let x = (n as f64).ln();
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
        out.push(s + c);
    }
    out
}

/// Term ratio `|b_{j+1}/b_j|` for order `n` and the two binomial indices.
pub fn term_ratio(alpha: f64, n: usize, mk: usize, ml: usize) -> f64 {
    // Written symmetric in m ↔ n − m so (k, l) and (−k, −l) agree bitwise.
    let pair = |m: usize| {
        let m = m.min(n - m) as f64;
        (m + 1.0) * (n as f64 - m + 1.0)
    };
    let n = n as f64;
    alpha * alpha * (n + 1.0) * (n + 2.0) / (16.0 * pair(mk) * pair(ml))
}

/// Upper bound on `term_ratio` after term `j`.
pub fn proven_ratio_bound(alpha: f64, j: usize) -> f64 {
    alpha * alpha / (4.0 * ((j + 1) as f64).powi(2))
}

/// Ratio bound as printed alongside the decay result.
pub fn printed_ratio_bound(alpha: f64, big_l: usize) -> f64 {
    alpha * alpha / (8.0 * (big_l as f64 + 3.0))
}

/// Terms of the series for one `(k, l)`; empty when the parities differ.
pub fn series_terms(alpha: f64, k: i64, l: i64, n_terms: usize) -> Vec<f64> {
    if (k - l).rem_euclid(2) == 1 || n_terms == 0 {
        return Vec::new();
    }
    let big_l = k.unsigned_abs().max(l.unsigned_abs()) as usize;
    let lf = ln_factorials(big_l + 2 * n_terms + 2);
    let mk = |n: usize| ((n as i64 + k) / 2) as usize;
    let ml = |n: usize| ((n as i64 + l) / 2) as usize;
    let ln_binom = |n: usize, m: usize| {
        let m = m.min(n - m);
        lf[n] - lf[m] - lf[n - m]
    };
    let mut out = Vec::with_capacity(n_terms);
    if alpha == 0.0 {
        out.push(if big_l == 0 { 1.0 } else { 0.0 });
        return out;
    }
    let n0 = big_l;
    let ln_b0 = n0 as f64 * (alpha.abs().ln() - 4f64.ln()) - lf[n0] + ln_binom(n0, mk(n0)) + ln_binom(n0, ml(n0));
    let mut b = ln_b0.exp();
    for j in 0..n_terms {
        out.push(b);
        let n = n0 + 2 * j;
        b *= term_ratio(alpha, n, mk(n), ml(n));
    }
    out
}

/// Overall sign of `a_{k,l}`: `(−1)^{(k+l)/2}` times `sign(α)^L`.
fn coefficient_sign(alpha: f64, k: i64, l: i64) -> f64 {
    let big_l = k.abs().max(l.abs());
    let s = if ((k + l) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    if alpha < 0.0 && big_l % 2 == 1 {
        -s
    } else {
        s
    }
}

/// Sum of one coefficient series with certified truncation.
fn certified_sum(alpha: f64, k: i64, l: i64, n_terms: usize) -> Result<f64> {
    let terms = series_terms(alpha, k, l, n_terms);
    if terms.is_empty() {
        return Ok(0.0);
    }
    // The terms decrease once the ratio bound is below one; sum small to large.
    let mut total = 0.0;
    let mut certified = false;
    let mut used = terms.len();
    for (j, &b) in terms.iter().enumerate() {
        total += b;
        let rho = proven_ratio_bound(alpha, j);
        if rho < 1.0 {
            let tail = b * rho / (1.0 - rho);
            if tail <= CERTIFY_REL * total || b == 0.0 {
                certified = true;
                used = j + 1;
                break;
            }
        }
    }
    if !certified {
        return Err(Error::Certification(format!(
            "series for ({k}, {l}) at alpha={alpha} not certified within {n_terms} terms"
        )));
    }
    let sum: f64 = terms[..used].iter().rev().sum();
    Ok(coefficient_sign(alpha, k, l) * sum)
}

pub fn coeffs_by_series(alpha: f64, k_max: usize, n_terms: usize) -> Result<CoeffTable> {
    coeffs_by_series_for(alpha, k_max, n_terms, CoeffTarget::Metric)
}

pub fn coeffs_by_series_for(alpha: f64, k_max: usize, n_terms: usize, target: CoeffTarget) -> Result<CoeffTable> {
    if !alpha.is_finite() {
        return Err(Error::Usage(format!("alpha must be finite, got {alpha}")));
    }
    let a = target.signed_alpha(alpha);
    let km = k_max as i64;
    let idx: Vec<(i64, i64)> = (-km..=km).flat_map(|l| (-km..=km).map(move |k| (k, l))).collect();
    let vals: Vec<f64> = idx.par_iter().map(|&(k, l)| certified_sum(a, k, l, n_terms)).collect::<Result<_>>()?;
    let mut t = CoeffTable::zeros(k_max, alpha, CoeffSource::Series, target);
    for (&(k, l), v) in idx.iter().zip(vals) {
        t.set(k, l, Complex64::new(v, 0.0));
    }
    Ok(t)
}

pub fn coeffs_by_fft(alpha: f64, k_max: usize, grid_n: usize, target: CoeffTarget) -> Result<CoeffTable> {
    if grid_n < 4 * k_max || grid_n == 0 {
        return Err(Error::Usage(format!("grid_n={grid_n} must be at least 4*Kmax={}", 4 * k_max)));
    }
    let a = target.signed_alpha(alpha);
    let h = std::f64::consts::TAU / grid_n as f64;
    let mut buf: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|m| {
            let (x, y) = ((m % grid_n) as f64 * h, (m / grid_n) as f64 * h);
            Complex64::new((a * x.sin() * y.sin()).exp(), 0.0)
        })
        .collect();
    let mut fft = Fft2::new(grid_n, grid_n);
    fft.forward(&mut buf);
    let norm = 1.0 / (grid_n * grid_n) as f64;
    let mut t = CoeffTable::zeros(k_max, alpha, CoeffSource::Fft, target);
    let km = k_max as i64;
    let wrap = |k: i64| k.rem_euclid(grid_n as i64) as usize;
    for l in -km..=km {
        for k in -km..=km {
            t.set(k, l, buf[wrap(l) * grid_n + wrap(k)] * norm);
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `(L, C_L)` with `C_L = max_{max(|k|,|l|)=L} |a_{k,l}| L! / (α/2)^L`.
    pub per_l: Vec<(usize, f64)>,
    pub c_observed: f64,
    pub c_claimed: f64,
    /// Whether `c_claimed` bounds every `C_L` in range.
    pub holds: bool,
    /// `L` values below the range where `C_L > c_claimed`.
    pub small_l_exceptions: Vec<usize>,
}

/// Scans `C_L` over `l_range` (inclusive) against a claimed constant.
pub fn verify_bound(table: &CoeffTable, l_range: (usize, usize), c_claimed: f64) -> Result<BoundReport> {
    let (lo, hi) = l_range;
    if lo > hi || hi > table.k_max {
        return Err(Error::Usage(format!("L range [{lo}, {hi}] outside table Kmax={}", table.k_max)));
    }
    let lf = ln_factorials(table.k_max);
    let half = table.alpha.abs() / 2.0;
    let c_of = |big_l: usize| -> f64 {
        let li = big_l as i64;
        let mut amax: f64 = 0.0;
        for l in -li..=li {
            for k in -li..=li {
                if k.abs().max(l.abs()) == li {
                    amax = amax.max(table.get(k, l).norm());
                }
            }
        }
        if amax == 0.0 {
            return 0.0;
        }
        if half == 0.0 {
            return if big_l == 0 { amax } else { f64::INFINITY };
        }
        (amax.ln() + lf[big_l] - big_l as f64 * half.ln()).exp()
    };
    let per_l: Vec<(usize, f64)> = (lo..=hi).map(|l| (l, c_of(l))).collect();
    let c_observed = per_l.iter().map(|&(_, c)| c).fold(0.0, f64::max);
    let small_l_exceptions = (0..lo).filter(|&l| c_of(l) > c_claimed).collect();
    Ok(BoundReport { per_l, c_observed, c_claimed, holds: c_observed <= c_claimed, small_l_exceptions })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioCheck {
    pub checked: usize,
    pub violations: usize,
    /// Largest `observed / bound`, with its `(k, l, j)`.
    pub worst: (f64, i64, i64, usize),
}

/// Term-by-term check of a ratio bound `bound(L, j)` over `2 ≤ L ≤ k_max`
/// for the first `n_terms` terms.
pub fn check_ratio_bound(alpha: f64, k_max: usize, n_terms: usize, bound: impl Fn(usize, usize) -> f64) -> RatioCheck {
    let mut out = RatioCheck { checked: 0, violations: 0, worst: (0.0, 0, 0, 0) };
    let km = k_max as i64;
    for l in -km..=km {
        for k in -km..=km {
            let big_l = k.unsigned_abs().max(l.unsigned_abs()) as usize;
            if big_l < 2 || (k - l).rem_euclid(2) == 1 {
                continue;
            }
            for j in 0..n_terms {
                let n = big_l + 2 * j;
                let r = term_ratio(alpha, n, ((n as i64 + k) / 2) as usize, ((n as i64 + l) / 2) as usize);
                let b = bound(big_l, j);
                out.checked += 1;
                if r > b {
                    out.violations += 1;
                }
                if r / b > out.worst.0 {
                    out.worst = (r / b, k, l, j);
                }
            }
        }
    }
    out
}

/// `C(2n, n) ≤ 4ⁿ` for `1 ≤ n ≤ n_max`, evaluated exactly in floating point.
pub fn wallis_envelope_holds(n_max: usize) -> bool {
    let mut c = 1.0f64;
    let mut four = 1.0f64;
    for n in 1..=n_max {
        // C(2n, n) = C(2n−2, n−1)·(2n)(2n−1)/n².
        c *= (2 * n) as f64 * (2 * n - 1) as f64 / (n * n) as f64;
        four *= 4.0;
        if !four.is_finite() || c > four {
            return false;
        }
    }
    true
}

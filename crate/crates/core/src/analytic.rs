//! Truncated Dirichlet series, Euler products and the inequality probes.
//!
//! Every value here is a finite truncation with its cutoff recorded. Sums
//! over prime powers run over a [`PrimePowers`] list sorted by position, in a
//! fixed order, so repeated evaluations are bit-identical.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::counting::{root_of_unity, Mode};
use crate::error::{BeurlingError, Result};
use crate::measures::{for_each_prime_power, weight_for_mode, PrimePowerWeight};
use crate::prime_systems::PrimeSystem;
use crate::rational::{self, int, Rational};
use crate::semigroup::SemigroupTable;

/// Terms of the k-sums below this size are dropped.
pub const K_SUM_CUTOFF: f64 = 1e-18;

/// Target ratio of tail estimate to value in [`x_schedule`].
pub const SCHEDULE_TAIL_RATIO: f64 = 1e-3;

pub const DEFAULT_X_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformValue {
    pub value: Complex64,
    pub s: Complex64,
    pub truncation_x: f64,
    /// Bound on the neglected tail, when a density constant is available.
    pub tail_bound: Option<f64>,
    /// `value` plus the integral approximation of the tail.
    pub tail_corrected: Option<Complex64>,
    pub q: Option<u32>,
    pub k: Option<u32>,
}

fn check_sigma(s: Complex64) -> Result<()> {
    if s.re.is_nan() || s.re <= 1.0 {
        return Err(BeurlingError::invalid(format!(
            "Re s = {} must exceed 1",
            s.re
        )));
    }
    Ok(())
}

/// `a` in `(-pi, pi]` with `a = angle mod 2 pi`.
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `u^(-s)` from `ln u`, with the phase reduced before the trig calls.
fn power_from_ln(ln_u: f64, s: Complex64) -> Complex64 {
    Complex64::from_polar((-s.re * ln_u).exp(), reduce_angle(-s.im * ln_u))
}

/// One atom `p^k` of the prime-power measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimePowerAtom {
    pub prime: Rational,
    pub power: u32,
    pub position: Rational,
    pub ln_position: f64,
}

/// Every prime power `p^k <= cutoff` of a system, sorted by position.
#[derive(Debug, Clone)]
pub struct PrimePowers {
    atoms: Vec<PrimePowerAtom>,
    primes: Vec<(Rational, f64)>,
    cutoff: Rational,
}

impl PrimePowers {
    pub fn new(system: &PrimeSystem, cutoff: &Rational) -> Result<Self> {
        system.check_range("X", cutoff)?;
        let mut atoms = Vec::new();
        let mut primes = Vec::new();
        for_each_prime_power(system, cutoff, |p, k, pk| {
            let ln_p = rational::ln(p);
            if k == 1 {
                primes.push((*p, ln_p));
            }
            atoms.push(PrimePowerAtom {
                prime: *p,
                power: k,
                position: pk,
                ln_position: k as f64 * ln_p,
            });
        });
        atoms.sort_by_key(|a| a.position);
        Ok(PrimePowers {
            atoms,
            primes,
            cutoff: *cutoff,
        })
    }

    pub fn cutoff(&self) -> &Rational {
        &self.cutoff
    }

    pub fn atoms(&self) -> &[PrimePowerAtom] {
        &self.atoms
    }

    /// Atoms with position `<= x`.
    pub fn upto(&self, x: &Rational) -> Result<&[PrimePowerAtom]> {
        if *x > self.cutoff {
            return Err(BeurlingError::out_of_range("X", x, self.cutoff));
        }
        let n = self.atoms.partition_point(|a| a.position <= *x);
        Ok(&self.atoms[..n])
    }

    /// Primes `<= x` with their logarithms.
    fn primes_upto(&self, x: &Rational) -> Result<&[(Rational, f64)]> {
        if *x > self.cutoff {
            return Err(BeurlingError::out_of_range("X", x, self.cutoff));
        }
        let n = self.primes.partition_point(|(p, _)| p <= x);
        Ok(&self.primes[..n])
    }
}

/// `zeta_X(s) = sum_{n <= X} n^(-s)` over the enumerated table.
///
/// The tail bound is `C X^(1-sigma) (1 + |s|/(sigma-1))` with `C` the largest
/// sampled `N(u)/u` for `u` in `[X/2, X]`.
pub fn zeta_truncated(
    table: &SemigroupTable,
    s: Complex64,
    x: &Rational,
) -> Result<TransformValue> {
    check_sigma(s)?;
    table.check_range(x)?;
    let elements = table.elements();
    let n_x = elements.partition_point(|e| e.value <= *x);
    let value: Complex64 = elements[..n_x]
        .iter()
        .map(|e| power_from_ln(rational::ln(&e.value), s))
        .sum();

    let xf = rational::to_f64(x);
    let half = x / int(2);
    let start = elements.partition_point(|e| e.value < half);
    let mut c = n_x as f64 / xf;
    if half >= Rational::one() {
        c = c.max(start as f64 / rational::to_f64(&half));
    }
    for (i, e) in elements.iter().enumerate().take(n_x).skip(start) {
        c = c.max((i + 1) as f64 / rational::to_f64(&e.value));
    }
    let sigma = s.re;
    let tail_bound = c * xf.powf(1.0 - sigma) * (1.0 + s.norm() / (sigma - 1.0));

    let a = table.system().known_density().unwrap_or(n_x as f64 / xf);
    let one = Complex64::one();
    let tail_integral = (one - s) * xf.ln();
    let tail_corrected = value + a * tail_integral.exp() / (s - one);

    Ok(TransformValue {
        value,
        s,
        truncation_x: xf,
        tail_bound: Some(tail_bound),
        tail_corrected: Some(tail_corrected),
        q: None,
        k: None,
    })
}

/// `(sigma - 1) zeta(sigma)` with the tail-corrected truncated zeta; close to
/// the density `a` as `sigma` approaches 1.
pub fn density_control(table: &SemigroupTable, sigma: f64, x: &Rational) -> Result<f64> {
    let z = zeta_truncated(table, Complex64::new(sigma, 0.0), x)?;
    Ok((sigma - 1.0) * z.tail_corrected.unwrap_or(z.value).re)
}

fn sum_weighted(atoms: &[PrimePowerAtom], weight: &PrimePowerWeight, s: Complex64) -> Complex64 {
    atoms
        .iter()
        .map(|a| weight.eval(&a.prime, a.power) * power_from_ln(a.ln_position, s) / a.power as f64)
        .sum()
}

/// `log F_q^(s)` truncated to prime powers `p^k <= X`:
/// `sum w(p,k) p^(-ks) / k` with `w` the Ω weights (`variant = Total`) or the
/// ω weights (`variant = Distinct`).
pub fn log_fq_hat(
    pp: &PrimePowers,
    s: Complex64,
    q: u32,
    k: u32,
    variant: Mode,
    x: &Rational,
) -> Result<TransformValue> {
    check_sigma(s)?;
    let weight = weight_for_mode(q, k, variant)?;
    let value = sum_weighted(pp.upto(x)?, &weight, s);
    Ok(TransformValue {
        value,
        s,
        truncation_x: rational::to_f64(x),
        tail_bound: None,
        tail_corrected: None,
        q: Some(q),
        k: Some(k),
    })
}

/// The same logarithm over primes `p <= X` with the k-sum carried until the
/// remaining geometric tail is below [`K_SUM_CUTOFF`]; this is the logarithm
/// of the finite Euler product over the same primes.
pub fn log_fq_hat_prime_cutoff(
    pp: &PrimePowers,
    s: Complex64,
    q: u32,
    k: u32,
    variant: Mode,
    x: &Rational,
) -> Result<Complex64> {
    check_sigma(s)?;
    let weight = weight_for_mode(q, k, variant)?;
    let spread = match variant {
        Mode::Total => 0.0,
        Mode::Distinct => (Complex64::one() - root_of_unity(q as u64, k as u64)).norm(),
    };
    let mut total = Complex64::default();
    for (p, ln_p) in pp.primes_upto(x)? {
        let r = (-s.re * ln_p).exp();
        if spread * r >= 1.0 {
            return Err(BeurlingError::invalid(format!(
                "the logarithmic series diverges at p = {p} for Re s = {}",
                s.re
            )));
        }
        let tail = |j: i32| {
            let mut t = r.powi(j) / (1.0 - r);
            if spread > 0.0 {
                t += (spread * r).powi(j) / (1.0 - spread * r);
            }
            t
        };
        let mut power = 1u32;
        loop {
            total += weight.eval(p, power) * power_from_ln(power as f64 * ln_p, s) / power as f64;
            if tail(power as i32 + 1) < K_SUM_CUTOFF || power >= 100_000 {
                break;
            }
            power += 1;
        }
    }
    Ok(total)
}

/// Finite Euler product over primes `p <= X`: `prod 1/(1 - z p^(-s))` for Ω,
/// `prod (1 + z p^(-s) / (1 - p^(-s)))` for ω.
pub fn euler_product_fq(
    pp: &PrimePowers,
    s: Complex64,
    q: u32,
    k: u32,
    variant: Mode,
    x: &Rational,
) -> Result<TransformValue> {
    check_sigma(s)?;
    weight_for_mode(q, k, variant)?;
    let z = root_of_unity(q as u64, k as u64);
    let one = Complex64::one();
    let mut value = one;
    for (_, ln_p) in pp.primes_upto(x)? {
        let ps = power_from_ln(*ln_p, s);
        value *= match variant {
            Mode::Total => one / (one - z * ps),
            Mode::Distinct => one + z * ps / (one - ps),
        };
    }
    Ok(TransformValue {
        value,
        s,
        truncation_x: rational::to_f64(x),
        tail_bound: None,
        tail_corrected: None,
        q: Some(q),
        k: Some(k),
    })
}

/// `M - 1 - M cos(x) + cos(K x)`; nonnegative for every real `x` once `M >= K^2`.
pub fn trig_lhs(x: f64, k: u32, m: f64) -> f64 {
    m - 1.0 - m * x.cos() + (k as f64 * x).cos()
}

/// Combined trig weight of one atom `u`:
/// `M - 1 - M cos(t ln u - 2 pi q/K) + cos(K t ln u)`.
///
/// Both cosines are taken from the same reduced angle
/// `y = t ln u - 2 pi q/K`, using `cos(K t ln u) = cos(K y)`.
pub fn atom_trig_weight(ln_u: f64, t: f64, q: u32, k: u32, m: f64) -> f64 {
    let y = reduce_angle(t * ln_u - TAU * q as f64 / k as f64);
    trig_lhs(y, k, m)
}

/// `I(sigma, t) = sum_{p^k <= X} p^(-k sigma) (1 - cos(t ln p^k - 2 pi q/K)) / k`.
pub fn dini_integral(
    pp: &PrimePowers,
    q: u32,
    k: u32,
    t: f64,
    sigma: f64,
    x: &Rational,
) -> Result<f64> {
    check_sigma(Complex64::new(sigma, 0.0))?;
    if k < 2 || q >= k {
        return Err(BeurlingError::invalid(format!(
            "need 0 <= q < K, K >= 2 (q = {q}, K = {k})"
        )));
    }
    let shift = TAU * q as f64 / k as f64;
    Ok(pp
        .upto(x)?
        .iter()
        .map(|a| {
            let y = reduce_angle(t * a.ln_position - shift);
            (-sigma * a.ln_position).exp() * (1.0 - y.cos()) / a.power as f64
        })
        .sum())
}

fn check_inequality_params(sigma: f64, k: u32, m: f64) -> Result<()> {
    check_sigma(Complex64::new(sigma, 0.0))?;
    if k < 2 {
        return Err(BeurlingError::invalid(format!("K = {k} must be >= 2")));
    }
    let k2 = (k as f64) * (k as f64);
    if m < k2 {
        return Err(BeurlingError::invalid(format!(
            "M = {m} is below K^2 = {k2}; the trigonometric inequality needs M >= K^2"
        )));
    }
    Ok(())
}

/// `sum_{p^k <= X} p^(-k sigma) [M - 1 - M cos(t ln p^k - 2 pi q/K) + cos(K t ln p^k)] / k`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_inequality_check(
    pp: &PrimePowers,
    sigma: f64,
    t: f64,
    q: u32,
    k: u32,
    m: f64,
    x: &Rational,
) -> Result<f64> {
    check_inequality_params(sigma, k, m)?;
    Ok(pp
        .upto(x)?
        .iter()
        .map(|a| {
            (-sigma * a.ln_position).exp() * atom_trig_weight(a.ln_position, t, q, k, m)
                / a.power as f64
        })
        .sum())
}

/// `zeta_X(sigma)^(M-1) exp(-M Re(z log zeta_X(sigma+it))) |zeta_X(sigma+iKt)|`
/// with all three factors built from the same truncated prime-power sum.
#[allow(clippy::too_many_arguments)]
pub fn exponentiated_inequality(
    pp: &PrimePowers,
    sigma: f64,
    t: f64,
    q: u32,
    k: u32,
    m: f64,
    x: &Rational,
) -> Result<f64> {
    check_inequality_params(sigma, k, m)?;
    let atoms = pp.upto(x)?;
    let unit = PrimePowerWeight::Unit;
    let log_zeta_sigma = sum_weighted(atoms, &unit, Complex64::new(sigma, 0.0)).re;
    let log_zeta_t = sum_weighted(atoms, &unit, Complex64::new(sigma, t));
    let log_zeta_kt = sum_weighted(atoms, &unit, Complex64::new(sigma, k as f64 * t));
    let z = root_of_unity(q as u64, k as u64);
    Ok(((m - 1.0) * log_zeta_sigma).exp()
        * (-m * (z * log_zeta_t).re).exp()
        * log_zeta_kt.exp().norm())
}

/// Smallest power of ten `X <= x_cap` whose zeta tail estimate at `s = sigma`
/// is below [`SCHEDULE_TAIL_RATIO`] times the truncated value; `x_cap` if none is.
pub fn x_schedule(
    pp: &PrimePowers,
    sigma: f64,
    density: f64,
    x_cap: &Rational,
) -> Result<Rational> {
    check_sigma(Complex64::new(sigma, 0.0))?;
    if *x_cap > *pp.cutoff() {
        return Err(BeurlingError::out_of_range("X_cap", x_cap, pp.cutoff()));
    }
    let mut x = int(10);
    while x < *x_cap {
        let log_zeta: f64 = pp
            .upto(&x)?
            .iter()
            .map(|a| (-sigma * a.ln_position).exp() / a.power as f64)
            .sum();
        let xf = rational::to_f64(&x);
        let tail = density * xf.powf(1.0 - sigma) * (1.0 + sigma / (sigma - 1.0));
        if tail < SCHEDULE_TAIL_RATIO * log_zeta.exp() {
            return Ok(x);
        }
        x *= int(10);
    }
    Ok(*x_cap)
}

#[derive(Debug, Clone)]
pub struct ProbeParams {
    pub q: u32,
    pub k: u32,
    pub t_grid: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub x_cap: Rational,
    /// Density constant for the tail estimates.
    pub density: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalaszProbeRow {
    pub sigma: f64,
    pub t: f64,
    pub q: u32,
    pub k: u32,
    pub x: f64,
    /// `(sigma - 1) |exp(z log zeta_X(sigma + it))|`.
    pub p_value: f64,
    pub dini_i: f64,
    /// `(sigma - 1) zeta_X(sigma) exp(-I)`, equal to `p_value` up to rounding.
    pub relation: f64,
    pub tail_bound: f64,
}

/// Rows for every `sigma` (outer) and `t` (inner).
pub fn halasz_probe(pp: &PrimePowers, params: &ProbeParams) -> Result<Vec<HalaszProbeRow>> {
    let ProbeParams { q, k, .. } = *params;
    if k < 2 || q >= k {
        return Err(BeurlingError::invalid(format!(
            "need 0 <= q < K, K >= 2 (q = {q}, K = {k})"
        )));
    }
    if q == 0 {
        return Err(BeurlingError::invalid("the probe needs q != 0"));
    }
    if let Some(bad) = params.sigmas.iter().find(|s| s.is_nan() || **s <= 1.0) {
        return Err(BeurlingError::invalid(format!(
            "sigma = {bad} must exceed 1"
        )));
    }
    let z = root_of_unity(q as u64, k as u64);
    let unit = PrimePowerWeight::Unit;
    let mut rows = Vec::with_capacity(params.sigmas.len() * params.t_grid.len());
    for &sigma in &params.sigmas {
        let x = x_schedule(pp, sigma, params.density, &params.x_cap)?;
        let atoms = pp.upto(&x)?;
        let xf = rational::to_f64(&x);
        let log_zeta_sigma = sum_weighted(atoms, &unit, Complex64::new(sigma, 0.0)).re;
        for &t in &params.t_grid {
            let s = Complex64::new(sigma, t);
            let log_zeta = sum_weighted(atoms, &unit, s);
            let dini_i = dini_integral(pp, q, k, t, sigma, &x)?;
            rows.push(HalaszProbeRow {
                sigma,
                t,
                q,
                k,
                x: xf,
                p_value: (sigma - 1.0) * (z * log_zeta).re.exp(),
                dini_i,
                relation: (sigma - 1.0) * (log_zeta_sigma - dini_i).exp(),
                tail_bound: params.density
                    * xf.powf(1.0 - sigma)
                    * (1.0 + s.norm() / (sigma - 1.0)),
            });
        }
    }
    Ok(rows)
}

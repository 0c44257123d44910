//! Residue-class counts of the number of prime factors, the twisted
//! summatory functions `F_q(x) = sum_{n <= x} f_q(n)`, and the density and
//! Chebyshev diagnostics.
//!
//! All sums over the table are exact integer histograms by residue class;
//! roots of unity are applied once at the end.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BeurlingError, Result};
use crate::prime_systems::PrimeSystem;
use crate::rational::{self, Rational};
use crate::semigroup::{GenInteger, SemigroupTable};

/// Which factor count the residue classes are taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Ω: prime factors with multiplicity.
    Total,
    /// ω: distinct prime factors.
    Distinct,
}

impl Mode {
    pub fn factor_count(self, n: &GenInteger) -> u32 {
        match self {
            Mode::Total => n.omega_total,
            Mode::Distinct => n.omega_distinct,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Total => "total",
            Mode::Distinct => "distinct",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = BeurlingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(Mode::Total),
            "distinct" => Ok(Mode::Distinct),
            _ => Err(BeurlingError::invalid(format!(
                "mode must be total or distinct, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCountQuery {
    k: u32,
    c: u32,
    mode: Mode,
}

impl ClassCountQuery {
    pub fn new(k: u32, c: u32, mode: Mode) -> Result<Self> {
        check_modulus(k)?;
        if c >= k {
            return Err(BeurlingError::invalid(format!(
                "residue c = {c} must lie in [0, {k})"
            )));
        }
        Ok(ClassCountQuery { k, c, mode })
    }

    pub fn modulus(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> u32 {
        self.c
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }
}

fn check_modulus(k: u32) -> Result<()> {
    if k < 2 {
        return Err(BeurlingError::invalid(format!(
            "modulus K = {k} must be >= 2"
        )));
    }
    Ok(())
}

fn check_twist(q: u32, k: u32) -> Result<()> {
    check_modulus(k)?;
    if q >= k {
        return Err(BeurlingError::invalid(format!(
            "q = {q} must lie in [0, {k})"
        )));
    }
    Ok(())
}

/// `exp(2 pi i r / k)`, exact at multiples of a quarter turn.
pub fn root_of_unity(r: u64, k: u64) -> Complex64 {
    let r = r % k;
    if (4 * r).is_multiple_of(k) {
        return match 4 * r / k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / k as f64)
}

/// `f_q(n) = exp(2 pi i q l / K)` with `l` the factor count of `n` in `mode`.
pub fn f_q_value(n: &GenInteger, q: u32, k: u32, mode: Mode) -> Complex64 {
    let l = mode.factor_count(n) as u64;
    root_of_unity((q as u64 * l) % k as u64, k as u64)
}

/// Counts of table entries `<= x` by factor count mod `k`.
pub fn class_histogram(
    table: &SemigroupTable,
    k: u32,
    mode: Mode,
    x: &Rational,
) -> Result<Vec<u64>> {
    check_modulus(k)?;
    table.check_range(x)?;
    let mut counts = vec![0u64; k as usize];
    for n in table.prefix(x) {
        counts[(mode.factor_count(n) % k) as usize] += 1;
    }
    Ok(counts)
}

fn twisted_sum(counts: &[u64], q: u32) -> Complex64 {
    let k = counts.len() as u64;
    counts
        .iter()
        .enumerate()
        .map(|(r, &n)| root_of_unity(q as u64 * r as u64, k) * n as f64)
        .sum()
}

/// The twisted summatory function `F_q(x)`.
pub fn f_q_sum(
    table: &SemigroupTable,
    q: u32,
    k: u32,
    mode: Mode,
    x: &Rational,
) -> Result<Complex64> {
    check_twist(q, k)?;
    Ok(twisted_sum(&class_histogram(table, k, mode, x)?, q))
}

/// `S_{K,c}(x)`: entries `<= x` whose factor count is `c` mod `K`.
pub fn s_count(table: &SemigroupTable, query: &ClassCountQuery, x: &Rational) -> Result<u64> {
    Ok(class_histogram(table, query.k, query.mode, x)?[query.c as usize])
}

/// `(1/K) sum_q exp(-2 pi i q c / K) F_q(x)`, which should equal `S_{K,c}(x)`.
pub fn orthogonality_reconstruct(
    table: &SemigroupTable,
    query: &ClassCountQuery,
    x: &Rational,
) -> Result<Complex64> {
    let counts = class_histogram(table, query.k, query.mode, x)?;
    let k = query.k as u64;
    let total: Complex64 = (0..query.k)
        .map(|q| {
            let back = root_of_unity((k - (q as u64 * query.c as u64) % k) % k, k);
            back * twisted_sum(&counts, q)
        })
        .sum();
    Ok(total / query.k as f64)
}

/// Where the density constant of a scan came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySource {
    Known,
    Estimated,
}

/// A quantity tabulated over a strictly increasing grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub quantity: String,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Real quantities drop the imaginary column in CSV output.
    pub real: bool,
    pub metadata: serde_json::Value,
}

impl ScanResult {
    pub fn new(
        quantity: impl Into<String>,
        grid: Vec<f64>,
        values: Vec<Complex64>,
        real: bool,
        metadata: serde_json::Value,
    ) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(BeurlingError::invalid("grid and values differ in length"));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BeurlingError::invalid(
                "scan grid must be strictly increasing",
            ));
        }
        Ok(ScanResult {
            quantity: quantity.into(),
            grid,
            values,
            real,
            metadata,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.real {
            writeln!(w, "grid_point,value_re")?;
        } else {
            writeln!(w, "grid_point,value_re,value_im")?;
        }
        for (g, v) in self.grid.iter().zip(&self.values) {
            if self.real {
                writeln!(w, "{g},{}", v.re)?;
            } else {
                writeln!(w, "{g},{},{}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Density used to normalise `S_{K,c}`: the system's known value when it has
/// one, otherwise `N(x_max) / x_max`.
pub fn scan_density(table: &SemigroupTable) -> Result<(f64, DensitySource)> {
    if let Some(a) = table.system().known_density() {
        return Ok((a, DensitySource::Known));
    }
    let a = density_estimate(table);
    if a < 1e-6 {
        return Err(BeurlingError::Diagnostic(format!(
            "no known density and the empirical estimate {a:e} is degenerate"
        )));
    }
    Ok((a, DensitySource::Estimated))
}

/// `K S_{K,c}(x) / (a x)` over `x_grid`; tends to 1 under the theorem's hypotheses.
pub fn convergence_scan(
    table: &SemigroupTable,
    query: &ClassCountQuery,
    x_grid: &[Rational],
) -> Result<ScanResult> {
    let (a, source) = scan_density(table)?;
    let mut grid = Vec::with_capacity(x_grid.len());
    let mut values = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        let s = s_count(table, query, x)?;
        let xf = rational::to_f64(x);
        grid.push(xf);
        values.push(Complex64::new(query.k as f64 * s as f64 / (a * xf), 0.0));
    }
    let metadata = serde_json::json!({
        "system": table.system().spec_json(),
        "K": query.k,
        "c": query.c,
        "mode": query.mode,
        "density": a,
        "density_source": source,
        "x_max": rational::to_f64(table.x_max()),
    });
    ScanResult::new("K*S/(a*x)", grid, values, true, metadata)
}

/// `max pi(x) ln(x) / x` over the sample points (0 for an empty sample set).
pub fn chebyshev_ratio(system: &PrimeSystem, samples: &[Rational]) -> Result<f64> {
    let mut best = 0.0f64;
    for x in samples {
        let pi = system.pi_count(x)?;
        if pi == 0 {
            continue;
        }
        let xf = rational::to_f64(x);
        best = best.max(pi as f64 * rational::ln(x) / xf);
    }
    Ok(best)
}

/// Sample points where `pi(x) ln(x) / x` can peak: every prime value (the
/// ratio falls between consecutive primes once `x > e`), `e` itself, and
/// the limit.
pub fn chebyshev_samples(system: &PrimeSystem) -> Vec<Rational> {
    let mut out: Vec<Rational> = system.primes().to_vec();
    // 2718281828/10^9 just below e
    out.push(Rational::new(2_718_281_828, 1_000_000_000));
    if let Some(l) = system.limit() {
        out.push(*l);
    }
    out.retain(|x| system.check_range("x", x).is_ok());
    out.sort();
    out.dedup();
    out
}

/// `N(x_max) / x_max`.
pub fn density_estimate(table: &SemigroupTable) -> f64 {
    table.len() as f64 / rational::to_f64(table.x_max())
}

/// `sum_{n <= x} 1 / n`, the finite form of `int_1^x dN(u) / u`.
pub fn log_density(table: &SemigroupTable, x: &Rational) -> Result<f64> {
    table.check_range(x)?;
    Ok(table
        .prefix(x)
        .iter()
        .map(|n| 1.0 / rational::to_f64(&n.value))
        .sum())
}

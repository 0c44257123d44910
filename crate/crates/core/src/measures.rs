//! Finite discrete measures on `[1, x_max]` and their multiplicative algebra.
//!
//! Positions are exact rationals and atoms at equal positions always merge;
//! weights are complex floats. The central identity checked here is that
//! `exp*` of the prime-power measure `w dPi` reproduces the `f_q`-weighted
//! counting measure of the generalized integers.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use num_traits::{CheckedMul, One};
use serde::{Deserialize, Serialize};

use crate::counting::{f_q_value, root_of_unity, Mode};
use crate::error::{BeurlingError, Result};
use crate::prime_systems::PrimeSystem;
use crate::rational::{self, checked_div, checked_mul, int, Rational};
use crate::semigroup::{enumerate, SemigroupTable};

/// Atoms with `|w|` below this are dropped.
pub const ZERO_WEIGHT: f64 = 1e-15;

pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<(Rational, Complex64)>,
    x_max: Rational,
}

impl DiscreteMeasure {
    /// Builds a measure, merging equal positions and dropping zero weights.
    pub fn new(
        atoms: impl IntoIterator<Item = (Rational, Complex64)>,
        x_max: Rational,
    ) -> Result<Self> {
        let mut merged: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (pos, w) in atoms {
            if pos < Rational::one() {
                return Err(BeurlingError::invalid(format!(
                    "atom position {pos} is below 1"
                )));
            }
            if pos > x_max {
                return Err(BeurlingError::out_of_range("atom position", pos, x_max));
            }
            *merged.entry(pos).or_default() += w;
        }
        Ok(Self::from_merged(merged, x_max))
    }

    fn from_merged(merged: BTreeMap<Rational, Complex64>, x_max: Rational) -> Self {
        DiscreteMeasure {
            atoms: merged
                .into_iter()
                .filter(|(_, w)| w.norm() >= ZERO_WEIGHT)
                .collect(),
            x_max,
        }
    }

    pub fn empty(x_max: Rational) -> Self {
        DiscreteMeasure {
            atoms: Vec::new(),
            x_max,
        }
    }

    pub fn dirac(pos: Rational, weight: Complex64, x_max: Rational) -> Result<Self> {
        Self::new([(pos, weight)], x_max)
    }

    pub fn atoms(&self) -> &[(Rational, Complex64)] {
        &self.atoms
    }

    pub fn x_max(&self) -> &Rational {
        &self.x_max
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight_at(&self, pos: &Rational) -> Complex64 {
        self.atoms
            .binary_search_by(|(p, _)| p.cmp(pos))
            .map(|i| self.atoms[i].1)
            .unwrap_or_default()
    }

    /// Restriction to `[1, x_max]`.
    pub fn restrict(&self, x_max: &Rational) -> Self {
        DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|(p, _)| p <= x_max)
                .copied()
                .collect(),
            x_max: (*x_max).min(self.x_max),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let merged = self.atoms.iter().map(|&(p, w)| (p, w * c)).collect();
        Self::from_merged(merged, self.x_max)
    }

    /// Sum of two measures on the smaller of the two ranges.
    pub fn add(&self, other: &DiscreteMeasure) -> Self {
        let x_max = self.x_max.min(other.x_max);
        let mut merged: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for &(p, w) in self.atoms.iter().chain(&other.atoms) {
            if p <= x_max {
                *merged.entry(p).or_default() += w;
            }
        }
        Self::from_merged(merged, x_max)
    }

    /// Largest weight difference over the union of supports.
    pub fn max_discrepancy(&self, other: &DiscreteMeasure) -> f64 {
        let mut diff: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for &(p, w) in &self.atoms {
            *diff.entry(p).or_default() += w;
        }
        for &(p, w) in &other.atoms {
            *diff.entry(p).or_default() -= w;
        }
        diff.values().map(|d| d.norm()).fold(0.0, f64::max)
    }

    /// CSV dump: `pos_num,pos_den,weight_re,weight_im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "pos_num,pos_den,weight_re,weight_im")?;
        for (p, wt) in &self.atoms {
            writeln!(w, "{},{},{},{}", p.numer(), p.denom(), wt.re, wt.im)?;
        }
        Ok(())
    }
}

/// Weight functions on prime powers `(p, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PrimePowerWeight {
    /// Constant 1: `dPi` itself.
    Unit,
    /// `exp(2 pi i k q / K)`: the logarithm of the Ω-twisted generating function.
    Hq { q: u32, k: u32 },
    /// `1 - (1 - z)^k` with `z = exp(2 pi i q / K)`: the ω-twisted variant.
    Distinct { q: u32, k: u32 },
    /// The constant `z`.
    G1 { q: u32, k: u32 },
    /// `1 - z - (1 - z)^k` for `p > 2`, `-z` for `p <= 2`.
    G2 { q: u32, k: u32 },
    /// `1 - (1 - z)^k` for `p <= 2`, zero otherwise.
    G3 { q: u32, k: u32 },
}

fn check_qk(q: u32, k: u32) -> Result<()> {
    if k < 2 || q >= k {
        return Err(BeurlingError::invalid(format!(
            "need K >= 2 and 0 <= q < K, got q = {q}, K = {k}"
        )));
    }
    Ok(())
}

pub fn weight_hq(q: u32, k: u32) -> Result<PrimePowerWeight> {
    check_qk(q, k)?;
    Ok(PrimePowerWeight::Hq { q, k })
}

pub fn weight_distinct(q: u32, k: u32) -> Result<PrimePowerWeight> {
    check_qk(q, k)?;
    Ok(PrimePowerWeight::Distinct { q, k })
}

pub fn weight_g1(q: u32, k: u32) -> Result<PrimePowerWeight> {
    check_qk(q, k)?;
    Ok(PrimePowerWeight::G1 { q, k })
}

pub fn weight_g2(q: u32, k: u32) -> Result<PrimePowerWeight> {
    check_qk(q, k)?;
    Ok(PrimePowerWeight::G2 { q, k })
}

pub fn weight_g3(q: u32, k: u32) -> Result<PrimePowerWeight> {
    check_qk(q, k)?;
    Ok(PrimePowerWeight::G3 { q, k })
}

/// The weight family matching a counting mode.
pub fn weight_for_mode(q: u32, k: u32, mode: Mode) -> Result<PrimePowerWeight> {
    match mode {
        Mode::Total => weight_hq(q, k),
        Mode::Distinct => weight_distinct(q, k),
    }
}

fn one_minus_z_pow(q: u32, modulus: u32, power: u32) -> Complex64 {
    (Complex64::one() - root_of_unity(q as u64, modulus as u64)).powu(power)
}

impl PrimePowerWeight {
    pub fn eval(&self, p: &Rational, power: u32) -> Complex64 {
        let small_prime = *p <= int(2);
        match *self {
            PrimePowerWeight::Unit => Complex64::one(),
            PrimePowerWeight::Hq { q, k } => {
                root_of_unity((power as u64 * q as u64) % k as u64, k as u64)
            }
            PrimePowerWeight::Distinct { q, k } => Complex64::one() - one_minus_z_pow(q, k, power),
            PrimePowerWeight::G1 { q, k } => root_of_unity(q as u64, k as u64),
            PrimePowerWeight::G2 { q, k } => {
                let z = root_of_unity(q as u64, k as u64);
                if small_prime {
                    -z
                } else {
                    Complex64::one() - z - one_minus_z_pow(q, k, power)
                }
            }
            PrimePowerWeight::G3 { q, k } => {
                if small_prime {
                    Complex64::one() - one_minus_z_pow(q, k, power)
                } else {
                    Complex64::default()
                }
            }
        }
    }

    /// Declared bound on `|w(p, k)|`.
    pub fn envelope(&self, p: &Rational, power: u32) -> f64 {
        let geometric = 2f64.powi(power as i32);
        match self {
            PrimePowerWeight::Unit | PrimePowerWeight::Hq { .. } | PrimePowerWeight::G1 { .. } => {
                1.0
            }
            PrimePowerWeight::Distinct { .. } => 1.0 + geometric,
            PrimePowerWeight::G2 { .. } => {
                if *p <= int(2) {
                    1.0
                } else {
                    geometric
                }
            }
            PrimePowerWeight::G3 { .. } => 1.0 + geometric,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            PrimePowerWeight::Unit => "unit".into(),
            PrimePowerWeight::Hq { q, k } => format!("h_q(q={q},K={k})"),
            PrimePowerWeight::Distinct { q, k } => format!("distinct(q={q},K={k})"),
            PrimePowerWeight::G1 { q, k } => format!("g1(q={q},K={k})"),
            PrimePowerWeight::G2 { q, k } => format!("g2(q={q},K={k})"),
            PrimePowerWeight::G3 { q, k } => format!("g3(q={q},K={k})"),
        }
    }
}

/// Calls `f(p, k, p^k)` for every prime power `p^k <= x`, primes in order.
pub(crate) fn for_each_prime_power(
    system: &PrimeSystem,
    x: &Rational,
    mut f: impl FnMut(&Rational, u32, Rational),
) {
    for p in system.primes() {
        if p > x {
            break;
        }
        let mut pk = *p;
        let mut k = 1u32;
        loop {
            f(p, k, pk);
            match pk.checked_mul(p) {
                Some(next) if next <= *x => {
                    pk = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
}

/// `w dPi` restricted to `[1, x_max]`: an atom of weight `w(p, k) / k` at every
/// prime power `p^k <= x_max`.
pub fn dpi_measure(
    system: &PrimeSystem,
    x_max: &Rational,
    weight: &PrimePowerWeight,
) -> Result<DiscreteMeasure> {
    system.check_range("x_max", x_max)?;
    let mut atoms = Vec::new();
    for_each_prime_power(system, x_max, |p, k, pk| {
        atoms.push((pk, weight.eval(p, k) / k as f64));
    });
    DiscreteMeasure::new(atoms, *x_max)
}

/// Multiplicative convolution restricted to `[1, x_max]`.
pub fn convolve(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    x_max: &Rational,
) -> Result<DiscreteMeasure> {
    let mut merged: BTreeMap<Rational, Complex64> = BTreeMap::new();
    for &(a, wa) in &mu.atoms {
        if a > *x_max {
            break;
        }
        let bound = checked_div(x_max, &a)?;
        for &(b, wb) in &nu.atoms {
            if b > bound {
                break;
            }
            *merged.entry(checked_mul(&a, &b)?).or_default() += wa * wb;
        }
    }
    Ok(DiscreteMeasure::from_merged(merged, *x_max))
}

/// `delta_1 + sum_{j >= 1} mu^{*j} / j!` on `[1, x_max]`.
pub fn exp_star(mu: &DiscreteMeasure, x_max: &Rational) -> Result<DiscreteMeasure> {
    if let Some((p, _)) = mu.atoms.first() {
        if *p <= Rational::one() {
            return Err(BeurlingError::invalid(
                "exp* needs every atom strictly above 1",
            ));
        }
    }
    let base = mu.restrict(x_max);
    let mut total: BTreeMap<Rational, Complex64> = BTreeMap::new();
    total.insert(Rational::one(), Complex64::one());
    let mut term = base.clone();
    let mut j = 1u32;
    while !term.is_empty() {
        for &(p, w) in &term.atoms {
            *total.entry(p).or_default() += w;
        }
        j += 1;
        term = convolve(&term, &base, x_max)?.scale(Complex64::new(1.0 / j as f64, 0.0));
    }
    Ok(DiscreteMeasure::from_merged(total, *x_max))
}

/// Mellin–Stieltjes transform `sum w * pos^(-s)`.
pub fn mellin(mu: &DiscreteMeasure, s: Complex64) -> Complex64 {
    mu.atoms
        .iter()
        .map(|(p, w)| w * (-s * rational::ln(p)).exp())
        .sum()
}

/// The measure `dF_q`: an atom at each distinct value `v` with weight
/// `sum_{value(n) = v} f_q(n)`.
pub fn table_measure(
    table: &SemigroupTable,
    q: u32,
    k: u32,
    mode: Mode,
) -> Result<DiscreteMeasure> {
    check_qk(q, k)?;
    let atoms = table
        .elements()
        .iter()
        .map(|n| (n.value, f_q_value(n, q, k, mode)));
    DiscreteMeasure::new(atoms, *table.x_max())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub weight: String,
    pub q: u32,
    pub k: u32,
    pub mode: Mode,
    pub x_max: f64,
    pub atoms_compared: usize,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `exp*(w dPi)` against `dF_q` built from the enumerated table.
pub fn verify_fq_reconstruction(
    system: &PrimeSystem,
    q: u32,
    k: u32,
    mode: Mode,
    x_max: &Rational,
) -> Result<ReconstructionReport> {
    let weight = weight_for_mode(q, k, mode)?;
    let table = enumerate(system, x_max)?;
    let expected = table_measure(&table, q, k, mode)?;
    let got = exp_star(&dpi_measure(system, x_max, &weight)?, x_max)?;
    Ok(report(weight.tag(), q, k, mode, x_max, &got, &expected))
}

/// Distinct mode through the three-piece split:
/// `exp*((g1 + g2) dPi) * exp*(g3 dPi)` against `dF_q`.
pub fn verify_split_reconstruction(
    system: &PrimeSystem,
    q: u32,
    k: u32,
    x_max: &Rational,
) -> Result<ReconstructionReport> {
    let table = enumerate(system, x_max)?;
    let expected = table_measure(&table, q, k, Mode::Distinct)?;
    let g12 = dpi_measure(system, x_max, &weight_g1(q, k)?)?.add(&dpi_measure(
        system,
        x_max,
        &weight_g2(q, k)?,
    )?);
    let g3 = dpi_measure(system, x_max, &weight_g3(q, k)?)?;
    let got = convolve(&exp_star(&g12, x_max)?, &exp_star(&g3, x_max)?, x_max)?;
    Ok(report(
        format!("g1+g2 * g3 (q={q},K={k})"),
        q,
        k,
        Mode::Distinct,
        x_max,
        &got,
        &expected,
    ))
}

fn report(
    weight: String,
    q: u32,
    k: u32,
    mode: Mode,
    x_max: &Rational,
    got: &DiscreteMeasure,
    expected: &DiscreteMeasure,
) -> ReconstructionReport {
    let max_discrepancy = got.max_discrepancy(expected);
    ReconstructionReport {
        weight,
        q,
        k,
        mode,
        x_max: rational::to_f64(x_max),
        atoms_compared: expected.len().max(got.len()),
        max_discrepancy,
        tolerance: RECONSTRUCTION_TOLERANCE,
        passed: max_discrepancy <= RECONSTRUCTION_TOLERANCE,
    }
}

/// Partial L1 integral `sum_{p^k <= x} |g2(p, k)| / (k p^k)`.
pub fn g2_l1_partial(system: &PrimeSystem, q: u32, k: u32, x: &Rational) -> Result<f64> {
    system.check_range("X", x)?;
    let g2 = weight_g2(q, k)?;
    let mut total = 0.0;
    for_each_prime_power(system, x, |p, power, pk| {
        total += g2.eval(p, power).norm() / (power as f64 * rational::to_f64(&pk));
    });
    Ok(total)
}

//! Enumeration of the generalized integers: every product of system primes
//! (with multiplicity, plus the empty product 1) up to a cutoff.
//!
//! Elements are identified with exponent vectors, so two different vectors
//! with the same value are two different entries.

use std::io::Write;
use std::sync::Arc;

use num_traits::{CheckedAdd, One};
use rayon::slice::ParallelSliceMut;

use crate::error::{BeurlingError, Result};
use crate::prime_systems::PrimeSystem;
use crate::rational::{self, checked_div, checked_mul, Rational};

pub const DEFAULT_MEM_CAP: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenInteger {
    pub value: Rational,
    /// Number of prime factors counted with multiplicity.
    pub omega_total: u32,
    /// Number of distinct primes used.
    pub omega_distinct: u32,
}

impl GenInteger {
    pub fn one() -> Self {
        GenInteger {
            value: Rational::one(),
            omega_total: 0,
            omega_distinct: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    /// Upper bound on the number of table entries.
    pub mem_cap: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            mem_cap: DEFAULT_MEM_CAP,
        }
    }
}

/// All generalized integers `<= x_max`, sorted by value.
///
/// Entries with equal values are ordered by their exponent vectors,
/// lexicographically ascending.
#[derive(Debug, Clone)]
pub struct SemigroupTable {
    system: Arc<PrimeSystem>,
    x_max: Rational,
    elements: Vec<GenInteger>,
}

struct Node {
    value: Rational,
    omega_total: u32,
    omega_distinct: u32,
    last: Option<usize>,
}

/// Depth-first walk over multisets of prime indices. A node's children
/// extend it by an index `j >= last`; they are visited from the largest `j`
/// down, which makes the visiting order the lexicographic order of exponent
/// vectors.
fn walk(
    primes: &[Rational],
    x_max: &Rational,
    mut visit: impl FnMut(&Node) -> Result<()>,
) -> Result<()> {
    let mut stack = vec![Node {
        value: Rational::one(),
        omega_total: 0,
        omega_distinct: 0,
        last: None,
    }];
    while let Some(node) = stack.pop() {
        visit(&node)?;
        let start = node.last.unwrap_or(0);
        let bound = checked_div(x_max, &node.value)?;
        let end = start + primes[start..].partition_point(|p| *p <= bound);
        for (j, p) in primes.iter().enumerate().take(end).skip(start) {
            stack.push(Node {
                value: checked_mul(&node.value, p)?,
                omega_total: node.omega_total + 1,
                omega_distinct: node.omega_distinct + u32::from(node.last != Some(j)),
                last: Some(j),
            });
        }
    }
    Ok(())
}

pub fn enumerate(system: &PrimeSystem, x_max: &Rational) -> Result<SemigroupTable> {
    enumerate_with(system, x_max, EnumerateOptions::default())
}

pub fn enumerate_with(
    system: &PrimeSystem,
    x_max: &Rational,
    opts: EnumerateOptions,
) -> Result<SemigroupTable> {
    if *x_max < Rational::one() {
        return Err(BeurlingError::invalid(format!(
            "x_max = {x_max} is below 1"
        )));
    }
    system.check_range("x_max", x_max)?;

    // pilot pass: count only, stop as soon as the cap is exceeded
    let mut count: u64 = 0;
    walk(system.primes(), x_max, |_| {
        count += 1;
        if count > opts.mem_cap {
            return Err(BeurlingError::Resource {
                estimated: count,
                cap: opts.mem_cap,
            });
        }
        Ok(())
    })?;

    let mut elements = Vec::with_capacity(count as usize);
    walk(system.primes(), x_max, |node| {
        elements.push(GenInteger {
            value: node.value,
            omega_total: node.omega_total,
            omega_distinct: node.omega_distinct,
        });
        Ok(())
    })?;
    // stable: ties keep the exponent-vector order of the walk
    elements.par_sort_by(|a, b| a.value.cmp(&b.value));

    Ok(SemigroupTable {
        system: Arc::new(system.clone()),
        x_max: *x_max,
        elements,
    })
}

impl SemigroupTable {
    pub fn system(&self) -> &PrimeSystem {
        &self.system
    }

    pub fn x_max(&self) -> &Rational {
        &self.x_max
    }

    pub fn elements(&self) -> &[GenInteger] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn check_range(&self, x: &Rational) -> Result<()> {
        if *x < Rational::one() {
            return Err(BeurlingError::invalid(format!("x = {x} is below 1")));
        }
        if *x > self.x_max {
            return Err(BeurlingError::out_of_range("x", x, self.x_max));
        }
        Ok(())
    }

    /// The entries with value `<= x`; `x` must already be range-checked.
    pub(crate) fn prefix(&self, x: &Rational) -> &[GenInteger] {
        let n = self.elements.partition_point(|e| e.value <= *x);
        &self.elements[..n]
    }

    /// N(x): number of generalized integers `<= x`.
    pub fn n_count(&self, x: &Rational) -> Result<u64> {
        self.check_range(x)?;
        Ok(self.prefix(x).len() as u64)
    }

    /// CSV dump: `value_num,value_den,value_float,omega_total,omega_distinct`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "value_num,value_den,value_float,omega_total,omega_distinct"
        )?;
        for e in &self.elements {
            writeln!(
                w,
                "{},{},{},{},{}",
                e.value.numer(),
                e.value.denom(),
                rational::to_f64(&e.value),
                e.omega_total,
                e.omega_distinct
            )?;
        }
        Ok(())
    }
}

/// Riemann-weighted prime count: the sum over `k >= 1` of `pi(x^(1/k)) / k`,
/// computed exactly through the comparisons `p^k <= x`.
pub fn pi_riemann(system: &PrimeSystem, x: &Rational) -> Result<Rational> {
    system.check_range("x", x)?;
    let primes = system.primes();
    let mut total = Rational::from_integer(0);
    for k in 1u32.. {
        let count = primes.partition_point(|p| match rational::checked_pow(p, k) {
            Some(pk) => pk <= *x,
            None => false,
        });
        if count == 0 {
            break;
        }
        let term = Rational::new(count as u128, k as u128);
        total = total
            .checked_add(&term)
            .ok_or_else(|| BeurlingError::Overflow(format!("Pi({x})")))?;
    }
    Ok(total)
}

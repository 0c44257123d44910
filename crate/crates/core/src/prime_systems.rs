//! Discrete Beurling prime systems.
//!
//! A system is a finite, nondecreasing multiset of exact rationals > 1 together
//! with the generation limit up to which it is known to be complete. Queries
//! past the limit fail instead of silently undercounting.

use std::path::Path;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{BeurlingError, Result};
use crate::rational::{self, int, Rational, RationalJson};

/// How a system was generated.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Classical {
        limit: Rational,
    },
    /// A finite list. Without a limit the list is the whole system.
    Explicit {
        primes: Vec<Rational>,
        limit: Option<Rational>,
    },
    Modified {
        base_limit: Rational,
        removed: Vec<u128>,
        added: Vec<Rational>,
    },
}

#[derive(Debug, Clone)]
pub struct PrimeSystem {
    primes: Vec<Rational>,
    limit: Option<Rational>,
    spec: SystemSpec,
    known_density: Option<f64>,
}

/// Sieve of Eratosthenes: all primes `<= n`.
pub fn sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The classical primes up to `limit`, with density 1.
pub fn classical_primes(limit: &Rational) -> Result<PrimeSystem> {
    if *limit < int(2) {
        return Err(BeurlingError::EmptySystem(limit.to_string()));
    }
    let primes = sieve(rational::floor_u64(limit))
        .into_iter()
        .map(|p| int(p as u128))
        .collect();
    Ok(PrimeSystem {
        primes,
        limit: Some(*limit),
        spec: SystemSpec::Classical { limit: *limit },
        known_density: Some(1.0),
    })
}

/// Removes classical primes from and adds rationals to a classical system.
///
/// The density of the result is `prod (1 - 1/p)` over removed primes times
/// `prod r/(r - 1)` over added values.
pub fn modify_system(
    base: &PrimeSystem,
    removed: &[Rational],
    added: &[Rational],
) -> Result<PrimeSystem> {
    let SystemSpec::Classical { limit } = &base.spec else {
        return Err(BeurlingError::invalid(
            "modify_system needs a classical base system",
        ));
    };
    let mut removed_sorted: Vec<Rational> = removed.to_vec();
    removed_sorted.sort();
    removed_sorted.dedup();
    let mut density = base.known_density.unwrap_or(1.0);
    let mut removed_ints = Vec::with_capacity(removed_sorted.len());
    for r in &removed_sorted {
        if base.primes.binary_search(r).is_err() {
            return Err(BeurlingError::invalid(format!(
                "removed value {r} is not a prime of the base system"
            )));
        }
        density *= 1.0 - 1.0 / rational::to_f64(r);
        removed_ints.push(*r.numer());
    }
    for a in added {
        if *a <= Rational::one() {
            return Err(BeurlingError::invalid(format!(
                "added prime {a} must be greater than 1"
            )));
        }
        if a > limit {
            return Err(BeurlingError::out_of_range("added prime", a, limit));
        }
        let r = rational::to_f64(a);
        density *= r / (r - 1.0);
    }
    let mut primes: Vec<Rational> = base
        .primes
        .iter()
        .filter(|p| removed_sorted.binary_search(p).is_err())
        .copied()
        .chain(added.iter().copied())
        .collect();
    primes.sort();
    Ok(PrimeSystem {
        primes,
        limit: Some(*limit),
        spec: SystemSpec::Modified {
            base_limit: *limit,
            removed: removed_ints,
            added: added.to_vec(),
        },
        known_density: Some(density),
    })
}

impl PrimeSystem {
    /// A system given by an explicit list. With `limit = None` the list is the
    /// complete system and every range query is allowed.
    pub fn explicit(mut primes: Vec<Rational>, limit: Option<Rational>) -> Result<Self> {
        for p in &primes {
            if *p <= Rational::one() {
                return Err(BeurlingError::invalid(format!(
                    "prime {p} must be greater than 1"
                )));
            }
            if let Some(l) = &limit {
                if p > l {
                    return Err(BeurlingError::out_of_range("prime", p, l));
                }
            }
        }
        primes.sort();
        Ok(PrimeSystem {
            spec: SystemSpec::Explicit {
                primes: primes.clone(),
                limit,
            },
            primes,
            limit,
            known_density: None,
        })
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Classical { limit } => classical_primes(limit),
            SystemSpec::Explicit { primes, limit } => Self::explicit(primes.clone(), *limit),
            SystemSpec::Modified {
                base_limit,
                removed,
                added,
            } => {
                let base = classical_primes(base_limit)?;
                let removed: Vec<Rational> = removed.iter().map(|&r| int(r)).collect();
                modify_system(&base, &removed, added)
            }
        }
    }

    pub fn primes(&self) -> &[Rational] {
        &self.primes
    }

    pub fn limit(&self) -> Option<&Rational> {
        self.limit.as_ref()
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn known_density(&self) -> Option<f64> {
        self.known_density
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Fails when `x` lies past the generation limit.
    pub fn check_range(&self, what: &'static str, x: &Rational) -> Result<()> {
        match &self.limit {
            Some(limit) if x > limit => Err(BeurlingError::out_of_range(what, x, limit)),
            _ => Ok(()),
        }
    }

    /// Number of primes `<= x`, counted with multiplicity.
    pub fn pi_count(&self, x: &Rational) -> Result<u64> {
        self.check_range("x", x)?;
        Ok(self.primes.partition_point(|p| p <= x) as u64)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: SystemSpecFile = serde_json::from_str(s)?;
        Self::from_spec(&file.try_into()?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn spec_json(&self) -> SystemSpecFile {
        SystemSpecFile::from(&self.spec)
    }
}

/// On-disk system description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpecFile {
    #[serde(rename = "type")]
    pub kind: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<RationalJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removed: Vec<u128>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub added: Vec<RationalJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Classical,
    Explicit,
    Modified,
}

impl TryFrom<SystemSpecFile> for SystemSpec {
    type Error = BeurlingError;

    fn try_from(f: SystemSpecFile) -> Result<Self> {
        let limit = f.limit.map(rational::from_f64).transpose()?;
        let rationals = |v: Vec<RationalJson>| -> Result<Vec<Rational>> {
            v.into_iter().map(Rational::try_from).collect()
        };
        let need_limit = || BeurlingError::invalid("system spec is missing \"limit\"");
        Ok(match f.kind {
            SystemKind::Classical => SystemSpec::Classical {
                limit: limit.ok_or_else(need_limit)?,
            },
            SystemKind::Explicit => SystemSpec::Explicit {
                primes: rationals(f.primes)?,
                limit,
            },
            SystemKind::Modified => SystemSpec::Modified {
                base_limit: limit.ok_or_else(need_limit)?,
                removed: f.removed,
                added: rationals(f.added)?,
            },
        })
    }
}

impl From<&SystemSpec> for SystemSpecFile {
    fn from(spec: &SystemSpec) -> Self {
        let json = |v: &[Rational]| v.iter().map(RationalJson::from).collect();
        match spec {
            SystemSpec::Classical { limit } => SystemSpecFile {
                kind: SystemKind::Classical,
                limit: Some(rational::to_f64(limit)),
                primes: vec![],
                removed: vec![],
                added: vec![],
            },
            SystemSpec::Explicit { primes, limit } => SystemSpecFile {
                kind: SystemKind::Explicit,
                limit: limit.as_ref().map(rational::to_f64),
                primes: json(primes),
                removed: vec![],
                added: vec![],
            },
            SystemSpec::Modified {
                base_limit,
                removed,
                added,
            } => SystemSpecFile {
                kind: SystemKind::Modified,
                limit: Some(rational::to_f64(base_limit)),
                primes: vec![],
                removed: removed.clone(),
                added: json(added),
            },
        }
    }
}

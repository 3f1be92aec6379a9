//! The one-sided transposition (OST) shuffle on `G(m, n)`.
//!
//! A step picks a position `j` uniformly from `[n]`, then `i` uniformly from
//! `[j]`, swaps the cards at `i` and `j`, and rotates both of them by a
//! uniform `k` in `Z_m`. The generator `(i, j, k)` therefore has mass
//! `1 / (n * j * m)`.
//!
//! When `i == j` there is only one card to rotate and it is rotated by `k`
//! once. Rotating it twice would leave orientation unchanged for `m = 2`, and
//! the card drawn at position `j` could never be uniform over its `m`
//! orientations.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Rational64, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};

/// One OST move: swap positions `i <= j` (1-based) and rotate by `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    i: u32,
    j: u32,
    k: u32,
}

impl Generator {
    pub fn new(params: GroupParams, i: u32, j: u32, k: u32) -> Result<Self> {
        if i == 0 || i > j || j > params.n() {
            return Err(Error::InvalidArgument(format!(
                "generator needs 1 <= i <= j <= {}, got i={i}, j={j}",
                params.n()
            )));
        }
        if k >= params.m() {
            return Err(Error::InvalidArgument(format!(
                "exponent {k} not in Z_{}",
                params.m()
            )));
        }
        Ok(Self { i, j, k })
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The group element of this move: the transposition `(i j)` with `ξ^k`
    /// at positions `i` and `j` (at `i` only when `i == j`).
    pub fn to_element(&self, params: GroupParams) -> GroupElement {
        let mut g = GroupElement::identity(params);
        g.left_mul_transposition(self.i as usize - 1, self.j as usize - 1, self.k);
        g
    }

    pub fn mass(&self, params: GroupParams) -> Rational64 {
        Rational64::new(1, params.n() as i64 * self.j as i64 * params.m() as i64)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}^{}", self.i, self.j, self.k)
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Parses `i-j^k`. Range checks need the group and happen in [`Generator::new`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected i-j^k, got {s:?}"));
        let (i, rest) = s.trim().split_once('-').ok_or_else(bad)?;
        let (j, k) = rest.split_once('^').ok_or_else(bad)?;
        let num = |x: &str| x.parse::<u32>().map_err(|_| bad());
        Ok(Self {
            i: num(i)?,
            j: num(j)?,
            k: num(k)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorEntry {
    pub generator: Generator,
    pub mass: Rational64,
    pub probability: f64,
}

/// The OST law on `G(m, n)`.
///
/// Entries are generated on demand; sampling never materializes them, so the
/// distribution is usable for `n` in the thousands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorDistribution {
    params: GroupParams,
}

pub fn ost_generators(params: GroupParams) -> GeneratorDistribution {
    GeneratorDistribution { params }
}

impl GeneratorDistribution {
    pub fn params(&self) -> GroupParams {
        self.params
    }

    /// `m * n(n+1)/2`
    pub fn len(&self) -> usize {
        let n = self.params.n() as usize;
        self.params.m() as usize * n * (n + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All generators ordered by `(j, i, k)`.
    pub fn entries(&self) -> impl Iterator<Item = GeneratorEntry> + '_ {
        let (m, n) = (self.params.m(), self.params.n());
        (1..=n).flat_map(move |j| {
            (1..=j).flat_map(move |i| {
                (0..m).map(move |k| {
                    let generator = Generator { i, j, k };
                    let mass = generator.mass(self.params);
                    GeneratorEntry {
                        generator,
                        mass,
                        probability: 1.0 / (n as f64 * j as f64 * m as f64),
                    }
                })
            })
        })
    }

    /// Sum of all masses in exact arithmetic.
    pub fn total_mass_exact(&self) -> BigRational {
        self.entries()
            .map(|e| big(e.mass))
            .fold(BigRational::zero(), |acc, x| acc + x)
    }

    /// Draws `j` uniformly from `[n]`, then `i` from `[j]`, then `k` from
    /// `Z_m`. Returns the generator together with the first draw `j`.
    pub fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> (Generator, u32) {
        let j = rng.random_range(1..=self.params.n());
        let i = rng.random_range(1..=j);
        let k = rng.random_range(0..self.params.m());
        (Generator { i, j, k }, j)
    }

    /// The one-step law as exact rationals indexed by [`GroupIndex`].
    pub fn exact_step_law(&self, cap: usize) -> Result<Vec<BigRational>> {
        let order = self.params.exact_order(cap)?;
        let mut law = vec![BigRational::zero(); order];
        for e in self.entries() {
            let r = e.generator.to_element(self.params).rank()?;
            law[r.get()] += big(e.mass);
        }
        Ok(law)
    }
}

/// Mass the one-step law puts on the identity: `H_n / (n m)`.
///
/// Only the moves `(j, j, 0)` are the identity.
pub fn identity_mass(params: GroupParams) -> f64 {
    identity_mass_exact(params)
        .to_f64()
        .expect("finite rational")
}

pub fn identity_mass_exact(params: GroupParams) -> BigRational {
    let (m, n) = (params.m() as i64, params.n() as i64);
    (1..=n)
        .map(|j| BigRational::new(BigInt::from(1), BigInt::from(n * j * m)))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

//! Arithmetic in the generalized symmetric group `G(m, n)`.
//!
//! An element is a pair `(colors, perm)`: a vector of `n` exponents in `Z_m`
//! (the powers of a primitive `m`-th root of unity) together with a
//! permutation of `[n]`, stored as its one-line image sequence. The group has
//! order `m^n * n!`; `G(1, n)` is the symmetric group and `G(2, n)` the
//! hyperoctahedral group.
//!
//! # Composition convention
//!
//! The product is
//!
//! ```text
//! (k, σ)(k', σ') = (k_1 + k'_{σ(1)}, ..., k_n + k'_{σ(n)}, σσ')
//! ```
//!
//! where `σσ'` means "apply `σ` first, then `σ'`", so `(σσ')(i) = σ'(σ(i))`.
//! This is the only reading of the color-mixing rule `k_i + k'_{σ(i)}` under
//! which the product is associative; the usual right-to-left function
//! composition `σ(σ'(i))` paired with the same color rule is not (see the
//! `other_convention_is_not_associative` test).
//!
//! Under this convention an element acts on signed cards from the right:
//! card `i` carrying exponent `k` is sent to position `σ(i)` with exponent
//! `k + k_i`, and acting by `ab` is acting by `a` and then by `b`.
//!
//! Positions and permutation images are 1-based in the public API and in the
//! text form; they are stored 0-based.

use std::fmt;

use num::BigUint;

use crate::error::{Error, Result};

/// Default upper bound on the group order accepted by the exact engine.
pub const DEFAULT_EXACT_CAP: usize = 1 << 24;

/// The pair `(m, n)` fixing `G(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    m: u32,
    n: u32,
}

impl GroupParams {
    /// Validates `m >= 1` and `n >= 1`.
    ///
    /// No bound is placed on the group order here: the Monte Carlo code runs
    /// on groups far too large to index. Code that needs dense indexing calls
    /// [`GroupParams::exact_order`] with a cap.
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParams { m, n });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `m^n`, the size of every fiber of the projection to `S_n`, if it fits in a `usize`.
    pub fn color_count(&self) -> Option<usize> {
        (self.m as usize).checked_pow(self.n)
    }

    /// `m^n * n!`, if it fits in a `usize`.
    pub fn order(&self) -> Option<usize> {
        self.color_count()?.checked_mul(factorial(self.n as usize)?)
    }

    /// The exact group order, for messages.
    pub fn order_big(&self) -> BigUint {
        let colors = BigUint::from(self.m).pow(self.n);
        (1..=self.n).fold(colors, |acc, k| acc * BigUint::from(k))
    }

    /// The group order, provided it does not exceed `cap`.
    pub fn exact_order(&self, cap: usize) -> Result<usize> {
        match self.order() {
            Some(order) if order <= cap => Ok(order),
            _ => Err(Error::Capacity {
                m: self.m,
                n: self.n,
                order: self.order_big().to_string(),
                cap,
            }),
        }
    }

    pub(crate) fn ensure_same(&self, other: &GroupParams) -> Result<()> {
        if self != other {
            return Err(Error::ParamMismatch(self.m, self.n, other.m, other.n));
        }
        Ok(())
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{})", self.m, self.n)
    }
}

/// Dense index of an element: `lehmer_rank(perm) * m^n + colors` read as a
/// little-endian base-`m` number.
///
/// With this layout the `m^n` colorings of one permutation occupy a contiguous
/// block, so summing over a fiber of the projection is a segmented sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupIndex(pub usize);

impl GroupIndex {
    pub fn get(self) -> usize {
        self.0
    }
}

/// A signed card: a position (or card label) in `1..=n` with an exponent in `Z_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Card {
    pub position: u32,
    pub exponent: u32,
}

impl Card {
    pub fn new(position: u32, exponent: u32) -> Self {
        Self { position, exponent }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    m: u32,
    colors: Vec<u32>,
    // 0-based images
    perm: Vec<u32>,
}

impl GroupElement {
    /// Builds an element from its exponents and 1-based one-line permutation.
    pub fn new(params: GroupParams, colors: Vec<u32>, perm: Vec<u32>) -> Result<Self> {
        let n = params.n as usize;
        if colors.len() != n || perm.len() != n {
            return Err(Error::InvalidElement(format!(
                "expected {n} colors and {n} images, got {} and {}",
                colors.len(),
                perm.len()
            )));
        }
        if let Some(&k) = colors.iter().find(|&&k| k >= params.m) {
            return Err(Error::InvalidElement(format!(
                "exponent {k} not in Z_{}",
                params.m
            )));
        }
        let mut seen = vec![false; n];
        for &image in &perm {
            if image == 0 || image as usize > n || seen[image as usize - 1] {
                return Err(Error::InvalidElement(format!(
                    "{perm:?} is not a permutation of 1..={n}"
                )));
            }
            seen[image as usize - 1] = true;
        }
        let perm = perm.into_iter().map(|s| s - 1).collect();
        Ok(Self {
            m: params.m,
            colors,
            perm,
        })
    }

    #[cfg(test)]
    pub(crate) fn from_raw(m: u32, colors: Vec<u32>, perm: Vec<u32>) -> Self {
        debug_assert_eq!(colors.len(), perm.len());
        Self { m, colors, perm }
    }

    pub fn identity(params: GroupParams) -> Self {
        let n = params.n;
        Self {
            m: params.m,
            colors: vec![0; n as usize],
            perm: (0..n).collect(),
        }
    }

    pub fn params(&self) -> GroupParams {
        GroupParams {
            m: self.m,
            n: self.perm.len() as u32,
        }
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// The one-line permutation, 1-based.
    pub fn perm(&self) -> Vec<u32> {
        self.perm.iter().map(|s| s + 1).collect()
    }

    pub(crate) fn perm_raw(&self) -> &[u32] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.colors.iter().all(|&k| k == 0)
            && self.perm.iter().enumerate().all(|(i, &s)| i as u32 == s)
    }

    /// Group product `self * rhs` (see the module docs for the convention).
    pub fn compose(&self, rhs: &GroupElement) -> Result<GroupElement> {
        self.params().ensure_same(&rhs.params())?;
        let m = self.m;
        let (colors, perm) = self
            .perm
            .iter()
            .zip(&self.colors)
            .map(|(&s, &k)| ((k + rhs.colors[s as usize]) % m, rhs.perm[s as usize]))
            .unzip();
        Ok(GroupElement {
            m,
            colors,
            perm,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        let n = self.perm.len();
        let mut colors = vec![0; n];
        let mut perm = vec![0; n];
        for (i, (&s, &k)) in self.perm.iter().zip(&self.colors).enumerate() {
            perm[s as usize] = i as u32;
            colors[s as usize] = (self.m - k) % self.m;
        }
        GroupElement {
            m: self.m,
            colors,
            perm,
        }
    }

    /// The color-forgetting homomorphism onto `S_n`, returned as an element of `G(1, n)`.
    pub fn project(&self) -> GroupElement {
        GroupElement {
            m: 1,
            colors: vec![0; self.perm.len()],
            perm: self.perm.clone(),
        }
    }

    /// Sends card `i` with exponent `k` to position `σ(i)` with exponent `k + k_i`.
    pub fn act_on_card(&self, card: Card) -> Result<Card> {
        let n = self.perm.len() as u32;
        if card.position == 0 || card.position > n {
            return Err(Error::PositionOutOfRange {
                position: card.position,
                n,
            });
        }
        if card.exponent >= self.m {
            return Err(Error::InvalidElement(format!(
                "exponent {} not in Z_{}",
                card.exponent, self.m
            )));
        }
        let i = card.position as usize - 1;
        Ok(Card {
            position: self.perm[i] + 1,
            exponent: (card.exponent + self.colors[i]) % self.m,
        })
    }

    pub fn rank(&self) -> Result<GroupIndex> {
        let params = self.params();
        let fiber = params
            .color_count()
            .filter(|_| params.order().is_some())
            .ok_or_else(|| capacity(params))?;
        Ok(GroupIndex(lehmer_rank(&self.perm) * fiber + self.color_index()))
    }

    pub fn unrank(params: GroupParams, index: GroupIndex) -> Result<GroupElement> {
        let order = params.order().ok_or_else(|| capacity(params))?;
        if index.0 >= order {
            return Err(Error::IndexOutOfRange {
                rank: index.0,
                order,
            });
        }
        let fiber = params.color_count().expect("fits when the order does");
        let n = params.n as usize;
        let mut colors = Vec::with_capacity(n);
        let mut rest = index.0 % fiber;
        for _ in 0..n {
            colors.push((rest % params.m as usize) as u32);
            rest /= params.m as usize;
        }
        Ok(GroupElement {
            m: params.m,
            colors,
            perm: lehmer_unrank(index.0 / fiber, n),
        })
    }

    /// Colors read as a little-endian base-`m` number.
    pub(crate) fn color_index(&self) -> usize {
        self.colors
            .iter()
            .rev()
            .fold(0, |acc, &k| acc * self.m as usize + k as usize)
    }

    /// In-place `self <- g * self` for `g` a colored transposition: `g` swaps
    /// 0-based positions `i <= j` and carries exponent `k` at both of them (at
    /// `i` alone when `i == j`).
    pub(crate) fn left_mul_transposition(&mut self, i: usize, j: usize, k: u32) {
        self.perm.swap(i, j);
        self.colors.swap(i, j);
        self.colors[i] = (self.colors[i] + k) % self.m;
        if i != j {
            self.colors[j] = (self.colors[j] + k) % self.m;
        }
    }

    /// Parses the text form `k1,...,kn|s1,...,sn`.
    pub fn parse(params: GroupParams, text: &str) -> Result<GroupElement> {
        let (colors, perm) = text
            .trim()
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("missing '|' in {text:?}")))?;
        let numbers = |part: &str| -> Result<Vec<u32>> {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number {x:?} in {text:?}")))
                })
                .collect()
        };
        GroupElement::new(params, numbers(colors)?, numbers(perm)?)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &mut dyn Iterator<Item = u32>| {
            xs.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        write!(
            f,
            "{}|{}",
            join(&mut self.colors.iter().copied()),
            join(&mut self.perm.iter().map(|s| s + 1))
        )
    }
}

fn capacity(params: GroupParams) -> Error {
    Error::Capacity {
        m: params.m,
        n: params.n,
        order: params.order_big().to_string(),
        cap: usize::MAX,
    }
}

pub fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Lexicographic rank of a 0-based permutation via its Lehmer code.
pub fn lehmer_rank(perm: &[u32]) -> usize {
    let n = perm.len();
    let mut rank = 0;
    for (p, &x) in perm.iter().enumerate() {
        let smaller_after = perm[p + 1..].iter().filter(|&&y| y < x).count();
        rank = rank * (n - p) + smaller_after;
    }
    rank
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(mut rank: usize, n: usize) -> Vec<u32> {
    let mut digits = vec![0usize; n];
    for p in (0..n).rev() {
        let radix = n - p;
        digits[p] = rank % radix;
        rank /= radix;
    }
    let mut pool: Vec<u32> = (0..n as u32).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

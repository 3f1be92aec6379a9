//! Exhaustive invariant checks on small groups, run by `ost selftest`.

use std::fmt;

use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{DenseDistribution, ExactEngine};
use crate::group::{GroupElement, GroupIndex, GroupParams};
use crate::shuffle::{identity_mass, ost_generators};

/// Groups larger than this get sampled triples in the associativity check.
const EXHAUSTIVE_TRIPLES_MAX_ORDER: usize = 64;
const SAMPLED_TRIPLES: usize = 20_000;
const SAMPLING_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfTestFailure {
    pub check: String,
    pub detail: String,
}

impl fmt::Display for SelfTestFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed: {}", self.check, self.detail)
    }
}

impl std::error::Error for SelfTestFailure {}

type Check = Result<String, SelfTestFailure>;

fn fail(check: &str, params: GroupParams, detail: impl fmt::Display) -> SelfTestFailure {
    SelfTestFailure {
        check: format!("{check} on {params}"),
        detail: detail.to_string(),
    }
}

pub fn default_groups() -> Vec<GroupParams> {
    [(2, 2), (2, 3), (3, 3), (1, 4)]
        .into_iter()
        .map(|(m, n)| GroupParams::new(m, n).expect("valid"))
        .collect()
}

pub fn quick_groups() -> Vec<GroupParams> {
    vec![GroupParams::new(2, 2).expect("valid")]
}

/// Runs every check on every group, stopping at the first failure. Returns
/// one line per passed check.
pub fn run(groups: &[GroupParams]) -> Result<Vec<String>, SelfTestFailure> {
    let mut passed = Vec::new();
    for &params in groups {
        passed.push(check_element_count(params)?);
        passed.push(check_rank_bijection(params)?);
        passed.push(check_group_axioms(params)?);
        passed.push(check_projection(params)?);
        passed.push(check_generator_normalization(params)?);
        passed.push(check_step_law(params)?);
    }
    Ok(passed)
}

fn elements(params: GroupParams) -> Vec<GroupElement> {
    let order = params.order().expect("small group");
    (0..order)
        .map(|r| GroupElement::unrank(params, GroupIndex(r)).expect("in range"))
        .collect()
}

pub fn check_element_count(params: GroupParams) -> Check {
    let distinct: std::collections::HashSet<_> = elements(params).into_iter().collect();
    let expected = params.order().expect("small group");
    if distinct.len() != expected {
        return Err(fail("element count", params, format!("{} != {expected}", distinct.len())));
    }
    Ok(format!("element count on {params}: {expected}"))
}

pub fn check_rank_bijection(params: GroupParams) -> Check {
    for (r, g) in elements(params).iter().enumerate() {
        match g.rank() {
            Ok(idx) if idx.get() == r => {}
            other => return Err(fail("rank round trip", params, format!("rank {r} -> {g} -> {other:?}"))),
        }
    }
    Ok(format!("rank/unrank bijection on {params}"))
}

pub fn check_group_axioms(params: GroupParams) -> Check {
    let elems = elements(params);
    let e = GroupElement::identity(params);
    for a in &elems {
        let compose = |x: &GroupElement, y: &GroupElement| x.compose(y).expect("same group");
        if compose(&e, a) != *a || compose(a, &e) != *a {
            return Err(fail("identity law", params, a));
        }
        let inv = a.inverse();
        if !compose(a, &inv).is_identity() || !compose(&inv, a).is_identity() {
            return Err(fail("inverse law", params, a));
        }
    }

    let associative = |a: &GroupElement, b: &GroupElement, c: &GroupElement| {
        let left = a.compose(b).and_then(|ab| ab.compose(c));
        let right = b.compose(c).and_then(|bc| a.compose(&bc));
        left == right
    };
    let triples = if elems.len() <= EXHAUSTIVE_TRIPLES_MAX_ORDER {
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    if !associative(a, b, c) {
                        return Err(fail("associativity", params, format!("({a}) ({b}) ({c})")));
                    }
                }
            }
        }
        elems.len().pow(3)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
        for _ in 0..SAMPLED_TRIPLES {
            let mut pick = || &elems[rng.random_range(0..elems.len())];
            let (a, b, c) = (pick(), pick(), pick());
            if !associative(a, b, c) {
                return Err(fail("associativity", params, format!("({a}) ({b}) ({c})")));
            }
        }
        SAMPLED_TRIPLES
    };
    Ok(format!("group axioms on {params}: {triples} triples"))
}

pub fn check_projection(params: GroupParams) -> Check {
    let elems = elements(params);
    for a in &elems {
        for b in &elems {
            let lhs = a.compose(b).expect("same group").project();
            let rhs = a.project().compose(&b.project()).expect("same group");
            if lhs != rhs {
                return Err(fail("projection homomorphism", params, format!("({a}) ({b})")));
            }
        }
    }
    let images: std::collections::HashSet<_> = elems.iter().map(|g| g.project()).collect();
    let n_factorial = params.order().expect("small") / params.color_count().expect("small");
    if images.len() != n_factorial {
        return Err(fail("projection surjectivity", params, images.len()));
    }
    Ok(format!("projection homomorphism on {params}"))
}

pub fn check_generator_normalization(params: GroupParams) -> Check {
    let dist = ost_generators(params);
    let total = dist.total_mass_exact();
    if !total.is_one() {
        return Err(fail("generator normalization", params, total));
    }
    if dist.entries().count() != dist.len() {
        return Err(fail("generator count", params, dist.entries().count()));
    }
    Ok(format!("generator masses sum to 1 on {params}"))
}

/// The one-step law sums to one and puts `H_n / (n m)` on the identity.
pub fn check_identity_mass(params: GroupParams, one_step: &DenseDistribution) -> Check {
    let total = one_step.total();
    if (total - 1.0).abs() > 1e-12 {
        return Err(fail("one-step normalization", params, total));
    }
    let got = one_step.get(GroupIndex(0));
    let want = identity_mass(params);
    if (got - want).abs() > 1e-14 {
        return Err(fail("identity mass", params, format!("{got} != H_n/(nm) = {want}")));
    }
    Ok(format!("identity mass H_n/(nm) on {params}"))
}

pub fn check_step_law(params: GroupParams) -> Check {
    let engine = ExactEngine::new(params).map_err(|e| fail("exact engine", params, e))?;
    check_identity_mass(params, &engine.power(1))
}

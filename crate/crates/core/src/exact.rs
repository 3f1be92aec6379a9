//! Exact `t`-step laws of the OST walk on `G(m, n)` as dense vectors.
//!
//! A [`DenseDistribution`] stores one probability per group element, indexed
//! by [`GroupIndex`]. The walk starts at the identity and fresh generators
//! multiply on the left, `X^{t+1} = s X^t`, so one step is the convolution
//!
//! ```text
//! P^{t+1}(g) = Σ_s μ(s) P^t(s⁻¹ g).
//! ```
//!
//! Every output entry depends only on the read-only input vector, so a step
//! is computed as independent blocks (one block per permutation, see the rank
//! layout in [`crate::group`]) with no shared writes.
//!
//! # Separation distance
//!
//! For a walk started at the identity the worst-case separation
//! `1 - min_{g,h} P^t(h g⁻¹) / U(h)` reduces to `1 - |G| min_g P^t(g)`:
//! as `(g, h)` range over `G × G` the element `h g⁻¹` ranges over all of `G`,
//! and `U(h) = 1/|G|` does not depend on `h`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{lehmer_rank, lehmer_unrank, GroupElement, GroupIndex, GroupParams, DEFAULT_EXACT_CAP};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::shuffle::{ost_generators, GeneratorDistribution};

/// Tolerance for "sums to one" when validating a distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

const REDUCTION_CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseDistribution {
    params: GroupParams,
    mass: Vec<f64>,
}

impl DenseDistribution {
    /// Validates length, nonnegativity and normalization.
    pub fn from_masses(params: GroupParams, mass: Vec<f64>) -> Result<Self> {
        let order = params.order().ok_or_else(|| Error::InvalidDistribution("group too large".into()))?;
        if mass.len() != order {
            return Err(Error::InvalidDistribution(format!(
                "expected {order} entries, got {}",
                mass.len()
            )));
        }
        if let Some(x) = mass.iter().find(|x| x.is_nan() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!("negative or NaN mass {x}")));
        }
        let total = compensated_sum(mass.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self { params, mass })
    }

    pub fn delta_at_identity(params: GroupParams) -> Result<Self> {
        Self::delta_at_identity_capped(params, DEFAULT_EXACT_CAP)
    }

    pub fn delta_at_identity_capped(params: GroupParams, cap: usize) -> Result<Self> {
        let order = params.exact_order(cap)?;
        let mut mass = vec![0.0; order];
        mass[0] = 1.0;
        Ok(Self { params, mass })
    }

    pub fn uniform(params: GroupParams) -> Result<Self> {
        Self::uniform_capped(params, DEFAULT_EXACT_CAP)
    }

    pub fn uniform_capped(params: GroupParams, cap: usize) -> Result<Self> {
        let order = params.exact_order(cap)?;
        Ok(Self {
            params,
            mass: vec![1.0 / order as f64; order],
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn get(&self, index: GroupIndex) -> f64 {
        self.mass[index.get()]
    }

    pub fn at(&self, element: &GroupElement) -> Result<f64> {
        self.params.ensure_same(&element.params())?;
        Ok(self.mass[element.rank()?.get()])
    }

    pub fn total(&self) -> f64 {
        chunked_sum(&self.mass, |x| x)
    }
}

/// One step of the walk: the support of the step law, prepared for fast
/// left multiplication on dense vectors.
///
/// Each support element must be a colored transposition `(i j)` whose
/// exponents sit on `i` and `j`, or a diagonal move carrying an exponent on a
/// single position. The OST law is of this form.
#[derive(Debug, Clone)]
pub struct StepKernel {
    params: GroupParams,
    entries: Vec<KernelEntry>,
    // distinct transposed pairs, referenced by KernelEntry::pair
    pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct KernelEntry {
    i: usize,
    j: usize,
    // exponents of s⁻¹ at positions i and j
    add_i: usize,
    add_j: usize,
    pair: usize,
    mass: f64,
}

impl StepKernel {
    pub fn from_generators(gen: &GeneratorDistribution) -> Self {
        let params = gen.params();
        let support = gen
            .entries()
            .map(|e| (e.generator.to_element(params), e.probability));
        Self::from_elements(params, support).expect("OST generators have kernel shape")
    }

    pub fn from_elements<I>(params: GroupParams, support: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, f64)>,
    {
        let mut entries = Vec::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (element, mass) in support {
            params.ensure_same(&element.params())?;
            let inv = element.inverse();
            let perm = inv.perm_raw();
            let moved: Vec<usize> = (0..perm.len()).filter(|&p| perm[p] as usize != p).collect();
            let colored: Vec<usize> = (0..perm.len()).filter(|&p| inv.colors()[p] != 0).collect();
            let (i, j) = match moved[..] {
                [] => match colored[..] {
                    [] => (0, 0),
                    [p] => (p, p),
                    _ => return Err(not_kernel_shape(&element)),
                },
                [a, b] if colored.iter().all(|&p| p == a || p == b) => (a, b),
                _ => return Err(not_kernel_shape(&element)),
            };
            let pair = if i == j {
                usize::MAX
            } else {
                pairs.iter().position(|&q| q == (i, j)).unwrap_or_else(|| {
                    pairs.push((i, j));
                    pairs.len() - 1
                })
            };
            entries.push(KernelEntry {
                i,
                j,
                add_i: inv.colors()[i] as usize,
                add_j: inv.colors()[j] as usize,
                pair,
                mass,
            });
        }
        Ok(Self {
            params,
            entries,
            pairs,
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    /// `out(g) = Σ_s μ(s) p(s⁻¹ g)`.
    pub fn apply(&self, p: &DenseDistribution) -> Result<DenseDistribution> {
        self.params.ensure_same(&p.params)?;
        let m = self.params.m() as usize;
        let n = self.params.n() as usize;
        let fiber = self.params.color_count().expect("dense distribution exists");
        let pow: Vec<usize> = (0..n).map(|q| m.pow(q as u32)).collect();
        let input = &p.mass;

        let mut out = vec![0.0; input.len()];
        out.par_chunks_mut(fiber)
            .with_min_len((1 << 10) / fiber.min(1 << 10))
            .enumerate()
            .for_each(|(block, slots)| {
                let perm = lehmer_unrank(block, n);
                let swapped: Vec<usize> = self
                    .pairs
                    .iter()
                    .map(|&(i, j)| {
                        let mut q = perm.clone();
                        q.swap(i, j);
                        lehmer_rank(&q) * fiber
                    })
                    .collect();
                let base = block * fiber;
                for (c, slot) in slots.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for e in &self.entries {
                        let di = (c / pow[e.i]) % m;
                        let src = if e.i == e.j {
                            let ni = (e.add_i + di) % m;
                            base + c - di * pow[e.i] + ni * pow[e.i]
                        } else {
                            let dj = (c / pow[e.j]) % m;
                            let ni = (e.add_i + dj) % m;
                            let nj = (e.add_j + di) % m;
                            swapped[e.pair] + c + ni * pow[e.i] + nj * pow[e.j]
                                - di * pow[e.i]
                                - dj * pow[e.j]
                        };
                        acc += e.mass * input[src];
                    }
                    *slot = acc;
                }
            });
        Ok(DenseDistribution {
            params: self.params,
            mass: out,
        })
    }
}

fn not_kernel_shape(element: &GroupElement) -> Error {
    Error::InvalidArgument(format!(
        "{element} is not a colored transposition or single-position rotation"
    ))
}

pub fn convolve_step(p: &DenseDistribution, gen: &GeneratorDistribution) -> Result<DenseDistribution> {
    StepKernel::from_generators(gen).apply(p)
}

/// Half the L1 distance.
pub fn tv_distance(p: &DenseDistribution, q: &DenseDistribution) -> Result<f64> {
    p.params.ensure_same(&q.params)?;
    let diffs: Vec<f64> = p
        .mass
        .par_chunks(REDUCTION_CHUNK)
        .zip(q.mass.par_chunks(REDUCTION_CHUNK))
        .map(|(a, b)| compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y).abs())))
        .collect();
    Ok(0.5 * compensated_sum(diffs))
}

/// TV distance to the uniform law without materializing it.
pub fn tv_to_uniform(p: &DenseDistribution) -> f64 {
    let u = 1.0 / p.mass.len() as f64;
    0.5 * chunked_sum(&p.mass, |x| (x - u).abs())
}

/// `1 - |G| min_g p(g)`, clamped at 0 against rounding.
pub fn sep_distance(p: &DenseDistribution) -> f64 {
    let min = p
        .mass
        .par_chunks(REDUCTION_CHUNK)
        .map(|c| c.iter().copied().fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    (1.0 - p.mass.len() as f64 * min).max(0.0)
}

/// Sums each fiber of the projection onto `S_n`. The result lives on `G(1, n)`.
pub fn pushforward_projection(p: &DenseDistribution) -> DenseDistribution {
    let fiber = p.params.color_count().expect("dense distribution exists");
    let mass = p
        .mass
        .par_chunks(fiber)
        .map(|block| compensated_sum(block.iter().copied()))
        .collect();
    DenseDistribution {
        params: GroupParams::new(1, p.params.n()).expect("n >= 1"),
        mass,
    }
}

fn chunked_sum(xs: &[f64], f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let partial: Vec<f64> = xs
        .par_chunks(REDUCTION_CHUNK)
        .map(|c| c.iter().map(|&x| f(x)).collect::<CompensatedSum>().value())
        .collect();
    compensated_sum(partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tv,
    Sep,
}

/// `tv` and `sep` to uniform at `t = 0..=t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCurve {
    pub times: Vec<usize>,
    pub tv: Vec<f64>,
    pub sep: Vec<f64>,
}

impl DistanceCurve {
    pub fn distances(&self, metric: Metric) -> &[f64] {
        match metric {
            Metric::Tv => &self.tv,
            Metric::Sep => &self.sep,
        }
    }

    /// First tabulated `t` with distance strictly below `eps`.
    pub fn mixing_time(&self, eps: f64, metric: Metric) -> Option<usize> {
        self.times
            .iter()
            .zip(self.distances(metric))
            .find(|(_, &d)| d < eps)
            .map(|(&t, _)| t)
    }

    /// CSV with header `t,tv,sep` and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,tv,sep\n");
        for ((t, tv), sep) in self.times.iter().zip(&self.tv).zip(&self.sep) {
            out.push_str(&format!("{t},{tv:.16e},{sep:.16e}\n"));
        }
        out
    }
}

/// Machine-readable mixing summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingSummary {
    pub m: u32,
    pub n: u32,
    pub t_mix_quarter_tv: Option<usize>,
    pub t_mix_quarter_sep: Option<usize>,
}

impl MixingSummary {
    pub fn from_curve(params: GroupParams, curve: &DistanceCurve) -> Self {
        Self {
            m: params.m(),
            n: params.n(),
            t_mix_quarter_tv: curve.mixing_time(0.25, Metric::Tv),
            t_mix_quarter_sep: curve.mixing_time(0.25, Metric::Sep),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// The OST walk on one group, with its step kernel built once.
#[derive(Debug, Clone)]
pub struct ExactEngine {
    params: GroupParams,
    cap: usize,
    kernel: StepKernel,
}

impl ExactEngine {
    pub fn new(params: GroupParams) -> Result<Self> {
        Self::with_cap(params, DEFAULT_EXACT_CAP)
    }

    pub fn with_cap(params: GroupParams, cap: usize) -> Result<Self> {
        params.exact_order(cap)?;
        Ok(Self {
            params,
            cap,
            kernel: StepKernel::from_generators(&ost_generators(params)),
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn kernel(&self) -> &StepKernel {
        &self.kernel
    }

    pub fn delta(&self) -> DenseDistribution {
        DenseDistribution::delta_at_identity_capped(self.params, self.cap).expect("checked at construction")
    }

    pub fn uniform(&self) -> DenseDistribution {
        DenseDistribution::uniform_capped(self.params, self.cap).expect("checked at construction")
    }

    pub fn step(&self, p: &DenseDistribution) -> Result<DenseDistribution> {
        self.kernel.apply(p)
    }

    /// `P^t`: `t` steps from the identity.
    pub fn power(&self, t: usize) -> DenseDistribution {
        (0..t).fold(self.delta(), |p, _| self.kernel.apply(&p).expect("same params"))
    }

    /// Calls `visit(t, P^t)` for `t = 0..=t_max`.
    pub fn walk(&self, t_max: usize, mut visit: impl FnMut(usize, &DenseDistribution)) {
        let mut p = self.delta();
        for t in 0..=t_max {
            visit(t, &p);
            if t < t_max {
                p = self.kernel.apply(&p).expect("same params");
            }
        }
    }

    pub fn distance_curve(&self, t_max: usize) -> DistanceCurve {
        let mut curve = DistanceCurve {
            times: Vec::with_capacity(t_max + 1),
            tv: Vec::with_capacity(t_max + 1),
            sep: Vec::with_capacity(t_max + 1),
        };
        self.walk(t_max, |t, p| {
            curve.times.push(t);
            curve.tv.push(tv_to_uniform(p));
            curve.sep.push(sep_distance(p));
        });
        curve
    }

    /// `min { t : d(t) < eps }`, searching up to `max_t`.
    pub fn mixing_time(&self, eps: f64, metric: Metric, max_t: usize) -> Result<usize> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let mut p = self.delta();
        let mut last = f64::NAN;
        for t in 0..=max_t {
            last = match metric {
                Metric::Tv => tv_to_uniform(&p),
                Metric::Sep => sep_distance(&p),
            };
            if last < eps {
                return Ok(t);
            }
            if t < max_t {
                p = self.kernel.apply(&p)?;
            }
        }
        Err(Error::NotConverged { eps, max_t, last })
    }
}

//! Random elements and tuples for property checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coeff::{CoeffElem, ParamSpec};
use crate::fan::Fan;
use crate::piecewise::face_monomials;
use crate::series::{FormalHost, Monomial};
use crate::sr::SRSeries;

/// Sampling parameters for random elements.
#[derive(Debug, Clone, Copy)]
pub struct SampleShape {
    pub max_degree: u32,
    pub terms: usize,
    pub coeff_bound: i64,
}

impl Default for SampleShape {
    fn default() -> Self {
        SampleShape {
            max_degree: 4,
            terms: 6,
            coeff_bound: 5,
        }
    }
}

fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    let k = rng.gen_range(1..=bound.max(1));
    if rng.gen_bool(0.5) {
        -k
    } else {
        k
    }
}

/// Random integral element with face-monomial support of degree at most
/// `shape.max_degree`.
pub fn random_element<R: Rng>(
    fan: &Arc<Fan>,
    trunc: u32,
    shape: SampleShape,
    rng: &mut R,
) -> SRSeries {
    let z = ParamSpec::integers();
    let monos = face_monomials(fan, shape.max_degree.min(trunc));
    SRSeries::normalize(fan, &z, trunc, random_terms(&z, &monos, shape, rng))
}

fn random_terms<R: Rng>(
    z: &Arc<ParamSpec>,
    monos: &[Monomial],
    shape: SampleShape,
    rng: &mut R,
) -> Vec<(Monomial, CoeffElem)> {
    let mut out = Vec::new();
    for _ in 0..shape.terms {
        if let Some(m) = monos.choose(rng) {
            out.push((m.clone(), CoeffElem::from_int(z, nonzero(rng, shape.coeff_bound))));
        }
    }
    out
}

/// Random pair `(f, g)` with `deg f + deg g <= trunc`, so products are not
/// affected by truncation.
pub fn random_pair<R: Rng>(fan: &Arc<Fan>, trunc: u32, terms: usize, rng: &mut R) -> (SRSeries, SRSeries) {
    let df = rng.gen_range(0..=trunc);
    let shape = |d| SampleShape {
        max_degree: d,
        terms,
        coeff_bound: 5,
    };
    let f = random_element(fan, trunc, shape(df), rng);
    let g = random_element(fan, trunc, shape(trunc - df), rng);
    (f, g)
}

/// Compatible tuple built by perturbing the restrictions of a random element
/// on each cone, then repairing: every face monomial takes its coefficient
/// from the lowest-indexed maximal cone containing its support.
pub fn random_compatible_tuple<R: Rng>(
    fan: &Arc<Fan>,
    trunc: u32,
    shape: SampleShape,
    rng: &mut R,
) -> Vec<SRSeries> {
    let base = random_element(fan, trunc, shape, rng);
    let cones = fan.max_cones();
    let mut perturbed = base.restrictions();
    for (i, cone) in cones.iter().enumerate() {
        let z = ParamSpec::integers();
        let local: Vec<Monomial> = face_monomials(fan, shape.max_degree.min(trunc))
            .into_iter()
            .filter(|m| m.support_mask() & !cone.mask() == 0)
            .collect();
        let noise = SRSeries::normalize(fan, &z, trunc, random_terms(&z, &local, shape, rng));
        perturbed[i] = perturbed[i].try_add(&noise).expect("same context");
    }
    // repair
    let mut owner: BTreeMap<Monomial, CoeffElem> = BTreeMap::new();
    for f in &perturbed {
        for (m, c) in f.terms() {
            owner.entry(m.clone()).or_insert_with(|| c.clone());
        }
    }
    let z = ParamSpec::integers();
    cones
        .iter()
        .map(|cone| {
            let raw = owner
                .iter()
                .filter(|(m, _)| m.support_mask() & !cone.mask() == 0)
                .map(|(m, c)| (m.clone(), c.clone()));
            SRSeries::normalize(fan, &z, trunc, raw)
        })
        .collect()
}

/// Breaks compatibility of a tuple by bumping, in one entry, a monomial
/// shared by a random pair of maximal cones (a shared ray, or the constant
/// term when the pair shares none). Returns the pair.
pub fn break_tuple<R: Rng>(fan: &Fan, tuple: &mut [SRSeries], rng: &mut R) -> (usize, usize) {
    let cones = fan.max_cones();
    let mut pairs = Vec::new();
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            pairs.push((i, j));
        }
    }
    let &(i, j) = pairs.choose(rng).expect("at least two maximal cones");
    let shared = cones[i].mask() & cones[j].mask();
    let n = fan.num_rays();
    let mut exps = vec![0u32; n];
    if let Some(r) = (0..n).find(|r| shared >> r & 1 == 1) {
        exps[r] = 1;
    }
    let f = &tuple[i];
    let bump = SRSeries::normalize(
        f.fan(),
        f.coeff_spec(),
        f.truncation(),
        [(Monomial::new(exps), CoeffElem::from_int(f.coeff_spec(), 1))],
    );
    tuple[i] = f.try_add(&bump).expect("same context");
    (i, j)
}

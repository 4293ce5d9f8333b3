//! Piecewise polynomial and piecewise exponential functions on a fan, and
//! the ring map from the Stanley-Reisner model sending `x_rho` to the Courant
//! function `phi_rho` (or to `1 - e^{phi_rho}`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coeff::{CoeffElem, ParamSpec};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::fgl::FormalGroupLaw;
use crate::lattice;
use crate::series::{FormalHost, Monomial};
use crate::sr::SRSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PiecewiseMode {
    /// Integer polynomials in the dual coordinates `y_rho` of each cone.
    Polynomial,
    /// Integer Laurent polynomials in `t_rho = e^{y_rho}`.
    Exponential,
}

/// One function per maximal cone, written in that cone's dual coordinates.
/// Coordinates are named by ray, so pieces on different cones share the
/// names of their common rays.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunc {
    fan: Arc<Fan>,
    mode: PiecewiseMode,
    coords: Arc<ParamSpec>,
    pieces: Vec<CoeffElem>,
}

/// Ring of per-cone coordinates: `y_<label>` or invertible `t_<label>`.
pub fn coordinate_ring(fan: &Fan, mode: PiecewiseMode) -> Arc<ParamSpec> {
    let prefix = match mode {
        PiecewiseMode::Polynomial => "y_",
        PiecewiseMode::Exponential => "t_",
    };
    let names: Vec<String> = fan.labels().iter().map(|l| format!("{prefix}{l}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let inv: &[&str] = match mode {
        PiecewiseMode::Polynomial => &[],
        PiecewiseMode::Exponential => &refs,
    };
    ParamSpec::new(&refs, inv).expect("ray labels are distinct")
}

impl PiecewiseFunc {
    pub fn zero(fan: &Arc<Fan>, mode: PiecewiseMode) -> Self {
        let coords = coordinate_ring(fan, mode);
        let pieces = vec![CoeffElem::zero(&coords); fan.max_cones().len()];
        PiecewiseFunc {
            fan: fan.clone(),
            mode,
            coords,
            pieces,
        }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn mode(&self) -> PiecewiseMode {
        self.mode
    }

    pub fn pieces(&self) -> &[CoeffElem] {
        &self.pieces
    }

    fn coord(&self, ray: usize) -> CoeffElem {
        CoeffElem::param(&self.coords, self.coords.names()[ray].as_str())
            .expect("coordinate exists")
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.mode != other.mode || *self.fan != *other.fan {
            return Err(Error::Structural(
                "piecewise functions on different fans or modes".into(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| a + b).collect();
        Ok(PiecewiseFunc { pieces, ..self.clone() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| a * b).collect();
        Ok(PiecewiseFunc { pieces, ..self.clone() })
    }

    /// Restriction of the piece on maximal cone `i` to the face `face`:
    /// coordinates of dropped rays go to 0 (polynomial) or 1 (exponential).
    pub fn restrict_piece(&self, i: usize, face: &Cone) -> Result<CoeffElem> {
        let fill = match self.mode {
            PiecewiseMode::Polynomial => 0,
            PiecewiseMode::Exponential => 1,
        };
        let assignment: BTreeMap<String, CoeffElem> = self.fan.max_cones()[i]
            .rays()
            .iter()
            .filter(|r| !face.contains_ray(**r))
            .map(|&r| (self.coords.names()[r].clone(), CoeffElem::from_int(&self.coords, fill)))
            .collect();
        self.pieces[i].specialize(&self.coords, &assignment)
    }

    /// First pair of maximal cones whose pieces disagree on their common face.
    pub fn compatibility_failure(&self) -> Result<Option<(usize, usize)>> {
        let cones = self.fan.max_cones();
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let face = Cone::from_mask(cones[i].mask() & cones[j].mask());
                if self.restrict_piece(i, &face)? != self.restrict_piece(j, &face)? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_compatible(&self) -> Result<bool> {
        Ok(self.compatibility_failure()?.is_none())
    }

    /// Index of a maximal cone containing `point` and the point's coordinates
    /// in that cone's rays.
    pub fn locate(&self, point: &[i64]) -> Result<(usize, Vec<i64>)> {
        if point.len() != self.fan.dim() {
            return Err(Error::Domain(format!(
                "point has length {} but the lattice has rank {}",
                point.len(),
                self.fan.dim()
            )));
        }
        for (i, cone) in self.fan.max_cones().iter().enumerate() {
            let vecs: Vec<&[i64]> = cone.rays().iter().map(|&r| self.fan.ray(r)).collect();
            let Some(coords) = lattice::solve_coordinates(&vecs, point) else {
                continue;
            };
            if coords.iter().any(|c| c < &num_rational::BigRational::zero()) {
                continue;
            }
            let ints = coords
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        i64::try_from(c.to_integer()).map_err(|_| Error::Overflow("point coordinates"))
                    } else {
                        Err(Error::Domain("point is not a lattice point of the cone".into()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((i, ints));
        }
        Err(Error::Domain(format!(
            "point {point:?} is outside the support of the fan"
        )))
    }

    /// Value at a lattice point, after checking compatibility. Polynomial
    /// functions give an integer; exponential ones a Laurent polynomial in
    /// `q`, where `t_rho` evaluates to `q^{coordinate}`.
    pub fn eval(&self, point: &[i64]) -> Result<CoeffElem> {
        if let Some((i, j)) = self.compatibility_failure()? {
            let cones = self.fan.max_cones();
            return Err(Error::Incompatible {
                first: self.fan.cone_label(&cones[i]),
                second: self.fan.cone_label(&cones[j]),
                monomial: "piece".into(),
            });
        }
        self.eval_unchecked(point)
    }

    /// Value in the first maximal cone containing `point`, without the
    /// compatibility check.
    pub fn eval_unchecked(&self, point: &[i64]) -> Result<CoeffElem> {
        let (i, coords) = self.locate(point)?;
        let cone = &self.fan.max_cones()[i];
        let (target, make): (Arc<ParamSpec>, Box<dyn Fn(&Arc<ParamSpec>, i64) -> CoeffElem>) =
            match self.mode {
                PiecewiseMode::Polynomial => (ParamSpec::integers(), Box::new(CoeffElem::from_int)),
                PiecewiseMode::Exponential => (
                    ParamSpec::new(&["q"], &["q"])?,
                    Box::new(|s: &Arc<ParamSpec>, k: i64| {
                        let k = i32::try_from(k).expect("coordinate fits");
                        CoeffElem::monomial(s, vec![k], BigInt::one()).expect("q is invertible")
                    }),
                ),
            };
        let fill = match self.mode {
            PiecewiseMode::Polynomial => 0,
            PiecewiseMode::Exponential => 1,
        };
        let mut assignment = BTreeMap::new();
        for (r, name) in self.coords.names().iter().enumerate() {
            let value = match cone.rays().iter().position(|&x| x == r) {
                Some(k) => make(&target, coords[k]),
                None => CoeffElem::from_int(&target, fill),
            };
            assignment.insert(name.clone(), value);
        }
        self.pieces[i].specialize(&target, &assignment)
    }
}

impl fmt::Display for PiecewiseFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (cone, piece) in self.fan.max_cones().iter().zip(&self.pieces) {
            writeln!(f, "cone {}:", self.fan.cone_label(cone))?;
            writeln!(f, "  {piece}")?;
        }
        Ok(())
    }
}

/// `phi_rho`: the dual coordinate of `rho` on cones containing it, else 0.
pub fn courant_function(fan: &Arc<Fan>, ray: usize) -> PiecewiseFunc {
    let mut out = PiecewiseFunc::zero(fan, PiecewiseMode::Polynomial);
    let y = out.coord(ray);
    for (i, cone) in fan.max_cones().iter().enumerate() {
        if cone.contains_ray(ray) {
            out.pieces[i] = y.clone();
        }
    }
    out
}

fn check_law(fgl: &FormalGroupLaw, mode: PiecewiseMode) -> Result<()> {
    if !fgl.spec().is_empty() {
        return Err(Error::Domain(
            "piecewise comparison needs integer coefficients".into(),
        ));
    }
    let v = fgl.multiplicative_parameter().and_then(|v| v.as_integer());
    let want = match mode {
        PiecewiseMode::Polynomial => 0,
        PiecewiseMode::Exponential => 1,
    };
    if v != Some(BigInt::from(want)) {
        return Err(Error::Domain(match mode {
            PiecewiseMode::Polynomial => "polynomial mode needs the additive law".into(),
            PiecewiseMode::Exponential => {
                "exponential mode needs the multiplicative law with v = 1".into()
            }
        }));
    }
    Ok(())
}

/// Image of `f` under `x_rho -> phi_rho` (polynomial mode, additive law) or
/// `x_rho -> 1 - e^{phi_rho}` (exponential mode, `x + y - xy`).
pub fn to_piecewise(f: &SRSeries, fgl: &FormalGroupLaw, mode: PiecewiseMode) -> Result<PiecewiseFunc> {
    check_law(fgl, mode)?;
    if !crate::coeff::same_spec(f.coeff_spec(), fgl.spec()) {
        return Err(Error::Structural("element coefficients differ from the law's".into()));
    }
    let fan = f.fan();
    let mut out = PiecewiseFunc::zero(fan, mode);
    let one = CoeffElem::one(&out.coords);
    let images: Vec<CoeffElem> = (0..fan.num_rays())
        .map(|r| match mode {
            PiecewiseMode::Polynomial => out.coord(r),
            PiecewiseMode::Exponential => &one - &out.coord(r),
        })
        .collect();
    for (i, cone) in fan.max_cones().iter().enumerate() {
        let mut acc = CoeffElem::zero(&out.coords);
        for (m, c) in f.restrict(cone).terms() {
            let mut t = CoeffElem::from_bigint(&out.coords, c.as_integer().expect("integer coefficient"));
            for (r, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = &t * &images[r].pow(e);
                }
            }
            acc = &acc + &t;
        }
        out.pieces[i] = acc;
    }
    Ok(out)
}

/// Face monomials of degree at most `d`.
pub fn face_monomials(fan: &Fan, d: u32) -> Vec<Monomial> {
    let n = fan.num_rays();
    let mut out = Vec::new();
    for face in fan.faces() {
        let rays = face.rays();
        // exponent vectors with full support on this face
        let mut stack = vec![(0usize, vec![0u32; n], 0u32)];
        while let Some((k, exps, deg)) = stack.pop() {
            if k == rays.len() {
                out.push(Monomial::new(exps));
                continue;
            }
            for e in 1..=d.saturating_sub(deg + (rays.len() - k - 1) as u32) {
                let mut next = exps.clone();
                next[rays[k]] = e;
                stack.push((k + 1, next, deg + e));
            }
        }
    }
    out.retain(|m| m.degree() <= d);
    out.sort();
    out
}

/// Number of face monomials of degree at most `d` and the rank of their
/// polynomial-mode images evaluated at all lattice points of `[-r, r]^dim`.
pub fn injectivity_rank(fan: &Arc<Fan>, d: u32, radius: i64) -> Result<(usize, usize)> {
    let z = ParamSpec::integers();
    let law = FormalGroupLaw::additive(&z, d.max(1))?;
    let monos = face_monomials(fan, d);
    let mut points = vec![vec![]];
    for _ in 0..fan.dim() {
        points = points
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-radius..=radius).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let mut rows = Vec::with_capacity(monos.len());
    for m in &monos {
        let f = SRSeries::normalize(fan, &z, d.max(1), [(m.clone(), CoeffElem::one(&z))]);
        let pf = to_piecewise(&f, &law, PiecewiseMode::Polynomial)?;
        let row = points
            .iter()
            .map(|p| Ok(pf.eval_unchecked(p)?.as_integer().expect("integer value")))
            .collect::<Result<Vec<BigInt>>>()?;
        rows.push(row);
    }
    Ok((monos.len(), lattice::rank_of(&rows, points.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fan(name: &str) -> Arc<Fan> {
        Arc::new(Fan::catalog(name).unwrap())
    }

    fn int(c: CoeffElem) -> i64 {
        i64::try_from(c.as_integer().unwrap()).unwrap()
    }

    #[test]
    fn courant_on_p2() {
        let p2 = fan("pn:2");
        let phi = courant_function(&p2, 0);
        let first = p2.max_cones().iter().position(|c| c.rays() == [0, 1]).unwrap();
        let other = p2.max_cones().iter().position(|c| c.rays() == [1, 2]).unwrap();
        assert_eq!(phi.pieces()[first].to_string(), "y_x1");
        assert!(phi.pieces()[other].is_zero());
        assert!(phi.is_compatible().unwrap());
        assert_eq!(int(phi.eval(&[1, 0]).unwrap()), 1);
        assert_eq!(int(phi.eval(&[0, 1]).unwrap()), 0);
        assert_eq!(int(phi.eval(&[2, 1]).unwrap()), 2);
        assert_eq!(int(phi.eval(&[-1, -1]).unwrap()), 0);
    }

    #[test]
    fn courant_conditions_on_catalog() {
        for name in ["p1", "pn:2", "pn:3", "dp6", "hirzebruch:3"] {
            let f = fan(name);
            for r in 0..f.num_rays() {
                let phi = courant_function(&f, r);
                assert!(phi.is_compatible().unwrap(), "{name}");
                for s in 0..f.num_rays() {
                    let want = i64::from(r == s);
                    assert_eq!(int(phi.eval(f.ray(s)).unwrap()), want, "{name} {r} {s}");
                }
            }
        }
    }

    #[test]
    fn images_of_variables() {
        let p2 = fan("pn:2");
        let z = ParamSpec::integers();
        let add = FormalGroupLaw::additive(&z, 4).unwrap();
        let x1 = SRSeries::var(&p2, &z, 4, 0);
        assert_eq!(to_piecewise(&x1, &add, PiecewiseMode::Polynomial).unwrap(), courant_function(&p2, 0));
        let zero = SRSeries::zero(&p2, &z, 4);
        assert_eq!(
            to_piecewise(&zero, &add, PiecewiseMode::Polynomial).unwrap(),
            PiecewiseFunc::zero(&p2, PiecewiseMode::Polynomial)
        );
        let mult = FormalGroupLaw::multiplicative(CoeffElem::one(&z), 4).unwrap();
        let e = to_piecewise(&x1, &mult, PiecewiseMode::Exponential).unwrap();
        for (cone, piece) in p2.max_cones().iter().zip(e.pieces()) {
            if cone.contains_ray(0) {
                assert_eq!(piece.to_string(), "-t_x1 + 1");
            } else {
                assert!(piece.is_zero());
            }
        }
        assert!(e.is_compatible().unwrap());
        // 1 - q at the first ray
        assert_eq!(e.eval(&[1, 0]).unwrap().to_string(), "-q + 1");
    }

    #[test]
    fn wrong_law_is_domain_error() {
        let p2 = fan("pn:2");
        let z = ParamSpec::integers();
        let mult = FormalGroupLaw::multiplicative(CoeffElem::one(&z), 4).unwrap();
        let x1 = SRSeries::var(&p2, &z, 4, 0);
        assert!(matches!(to_piecewise(&x1, &mult, PiecewiseMode::Polynomial), Err(Error::Domain(_))));
        let add = FormalGroupLaw::additive(&z, 4).unwrap();
        assert!(matches!(to_piecewise(&x1, &add, PiecewiseMode::Exponential), Err(Error::Domain(_))));
    }

    #[test]
    fn character_class_is_linear_function() {
        // additive x_alpha maps to the global linear function alpha
        let dp6 = fan("dp6");
        let z = ParamSpec::integers();
        let add = FormalGroupLaw::additive(&z, 4).unwrap();
        let c = crate::sr::character_class(&dp6, &add, &[2, -1]).unwrap();
        let pf = to_piecewise(&c, &add, PiecewiseMode::Polynomial).unwrap();
        for x in -3..=3i64 {
            for y in -3..=3i64 {
                assert_eq!(int(pf.eval(&[x, y]).unwrap()), 2 * x - y);
            }
        }
    }

    #[test]
    fn outside_support_is_domain_error() {
        let f = fan("affine:2");
        let phi = courant_function(&f, 0);
        assert!(matches!(phi.eval(&[-1, 0]), Err(Error::Domain(_))));
    }

    #[test]
    fn dp6_injectivity() {
        let dp6 = fan("dp6");
        assert_eq!(face_monomials(&dp6, 3).len(), 37);
        assert_eq!(injectivity_rank(&dp6, 3, 3).unwrap(), (37, 37));
    }
}

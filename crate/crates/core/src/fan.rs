//! Smooth fans: validation, faces and minimal non-faces, dual bases, the
//! character-to-divisor matrix, Picard presentations and star subdivision.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, IntMatrix, SnfResult};

pub type LatticeVector = Vec<i64>;

pub const MAX_RAYS: usize = 64;

/// A cone given by the (sorted, distinct) indices of its rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn from_mask(mask: u64) -> Self {
        Cone((0..MAX_RAYS).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &r| m | 1u64 << r)
    }

    pub fn is_subset_of(&self, other: &Cone) -> bool {
        self.mask() & !other.mask() == 0
    }
}

/// Whether to run the exact linear-programming check that maximal cones
/// meet along common faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    Strict,
    Trusted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanIssue {
    WrongLength { ray: usize },
    ZeroRay { ray: usize },
    NonPrimitive { ray: usize },
    DuplicateRay { first: usize, second: usize },
    BadIndex { cone: usize, index: usize },
    EmptyCone { cone: usize },
    NonSmooth { cone: usize },
    Contained { inner: usize, outer: usize },
    BadIntersection { first: usize, second: usize },
    TooManyRays { count: usize },
}

impl fmt::Display for FanIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanIssue::WrongLength { ray } => write!(f, "ray {ray} has the wrong length"),
            FanIssue::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            FanIssue::NonPrimitive { ray } => write!(f, "ray {ray} is not primitive"),
            FanIssue::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            FanIssue::BadIndex { cone, index } => {
                write!(f, "cone {cone} refers to missing ray {index}")
            }
            FanIssue::EmptyCone { cone } => write!(f, "cone {cone} has no rays"),
            FanIssue::NonSmooth { cone } => write!(f, "cone {cone} is not smooth"),
            FanIssue::Contained { inner, outer } => {
                write!(f, "cone {inner} is contained in cone {outer}")
            }
            FanIssue::BadIntersection { first, second } => {
                write!(f, "cones {first} and {second} do not meet along a common face")
            }
            FanIssue::TooManyRays { count } => {
                write!(f, "{count} rays exceed the supported maximum of {MAX_RAYS}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<FanIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FanFile {
    dim: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// A fan in `Z^dim` given by its rays and maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<LatticeVector>,
    labels: Vec<String>,
    max_cones: Vec<Cone>,
    faces: HashSet<u64>,
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("r{i}")).collect()
}

impl Fan {
    /// Builds and validates a fan.
    pub fn new(
        dim: usize,
        rays: Vec<LatticeVector>,
        max_cones: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
        mode: Validation,
    ) -> Result<Self> {
        let fan = Self::unvalidated(dim, rays, max_cones, labels)?;
        let report = validate_fan(&fan, mode);
        match report.issues.first() {
            None => Ok(fan),
            Some(issue) => Err(Error::InvalidFan(issue.to_string())),
        }
    }

    /// Builds the combinatorial structure without geometric checks. Only the
    /// ray indices and labels are checked.
    pub fn unvalidated(
        dim: usize,
        rays: Vec<LatticeVector>,
        max_cones: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if rays.len() > MAX_RAYS {
            return Err(Error::InvalidFan(
                FanIssue::TooManyRays { count: rays.len() }.to_string(),
            ));
        }
        for (c, cone) in max_cones.iter().enumerate() {
            if let Some(&index) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(
                    FanIssue::BadIndex { cone: c, index }.to_string(),
                ));
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != rays.len() {
                    return Err(Error::InvalidFan(format!(
                        "{} labels for {} rays",
                        l.len(),
                        rays.len()
                    )));
                }
                let distinct: HashSet<&String> = l.iter().collect();
                if distinct.len() != l.len() {
                    return Err(Error::InvalidFan("ray labels must be distinct".into()));
                }
                l
            }
            None => default_labels(rays.len()),
        };
        let max_cones: Vec<Cone> = max_cones.into_iter().map(Cone::new).collect();
        let mut faces = HashSet::new();
        faces.insert(0u64);
        for cone in &max_cones {
            let m = cone.mask();
            // all submasks of m
            let mut sub = m;
            loop {
                faces.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        Ok(Fan {
            dim,
            rays,
            labels,
            max_cones,
            faces,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn ray_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// Whether the ray set `mask` spans a cone of the fan.
    pub fn is_face_mask(&self, mask: u64) -> bool {
        self.faces.contains(&mask)
    }

    pub fn is_face(&self, rays: &[usize]) -> bool {
        rays.iter().all(|&r| r < self.rays.len()) && self.is_face_mask(Cone::new(rays.to_vec()).mask())
    }

    /// All cones (including the zero cone), sorted by dimension then rays.
    pub fn faces(&self) -> Vec<Cone> {
        let mut out: Vec<Cone> = self.faces.iter().map(|&m| Cone::from_mask(m)).collect();
        out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        out
    }

    pub fn cone_label(&self, cone: &Cone) -> String {
        let names: Vec<&str> = cone.rays().iter().map(|&r| self.label(r)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn is_complete_dimensional(&self, cone: &Cone) -> bool {
        cone.dim() == self.dim
    }

    /// Inclusion-minimal ray sets that are not faces, found level by level:
    /// a candidate of size `k` is built from faces of size `k - 1` and kept
    /// when all its `(k-1)`-subsets are faces but it is not.
    pub fn minimal_nonfaces(&self) -> Vec<Cone> {
        let n = self.rays.len();
        let mut out = Vec::new();
        let mut level: Vec<u64> = vec![0];
        for k in 1..=n {
            let mut next = Vec::new();
            let mut seen = HashSet::new();
            for &f in &level {
                let start = if f == 0 { 0 } else { 64 - f.leading_zeros() as usize };
                for r in start..n {
                    let cand = f | 1u64 << r;
                    if !seen.insert(cand) {
                        continue;
                    }
                    let all_sub_faces = (0..n)
                        .filter(|&i| cand >> i & 1 == 1)
                        .all(|i| self.is_face_mask(cand & !(1u64 << i)));
                    if !all_sub_faces {
                        continue;
                    }
                    if self.is_face_mask(cand) {
                        next.push(cand);
                    } else {
                        out.push(Cone::from_mask(cand));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            let _ = k;
            level = next;
        }
        out.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        out
    }

    /// Row `i` of the matrix of rays of `cone`.
    pub fn ray_matrix(&self, cone: &Cone) -> IntMatrix {
        cone.rays().iter().map(|&r| self.rays[r].clone()).collect()
    }

    /// The characters `alpha_{tau,rho}` dual to the rays of a full-dimensional
    /// smooth cone: `<alpha_{tau,rho}, v_rho'> = delta`.
    pub fn dual_basis(&self, tau: &Cone) -> Result<BTreeMap<usize, LatticeVector>> {
        if tau.dim() != self.dim {
            return Err(Error::Domain(format!(
                "cone {} is not full-dimensional",
                self.cone_label(tau)
            )));
        }
        let a = self.ray_matrix(tau);
        let inv = lattice::unimodular_inverse(&a).map_err(|_| {
            Error::Domain(format!("cone {} is not smooth", self.cone_label(tau)))
        })?;
        // alpha_k is column k of A^-1
        Ok(tau
            .rays()
            .iter()
            .enumerate()
            .map(|(k, &r)| (r, (0..self.dim).map(|i| inv[i][k]).collect()))
            .collect())
    }

    /// `|rays| x dim` matrix whose row `rho` is `v_rho`.
    pub fn char_divisor_map(&self) -> IntMatrix {
        self.rays.clone()
    }

    pub fn picard_presentation(&self) -> Result<PicardPresentation> {
        let m = self.char_divisor_map();
        let snf = lattice::smith_normal_form(&m, self.dim)?;
        let rank = snf.rank();
        let rows = self.rays.len();
        let torsion: Vec<i64> = snf.diagonal[..rank]
            .iter()
            .copied()
            .filter(|&d| d != 1)
            .collect();
        let kept: Vec<usize> = (0..rank)
            .filter(|&i| snf.diagonal[i] != 1)
            .chain(rank..rows)
            .collect();
        let coordinates = kept.iter().map(|&i| snf.u[i].clone()).collect();
        Ok(PicardPresentation {
            invariant_factors: snf.diagonal[..rank].to_vec(),
            torsion,
            free_rank: rows - rank,
            injective: rank == self.dim,
            coordinates,
            snf,
        })
    }

    /// Star subdivision at `sigma`: adds the ray `sum_{rho in sigma} v_rho`
    /// and replaces every maximal cone `theta` containing `sigma` by the cones
    /// `theta - {rho} + {new}` for `rho` in `sigma`. Returns the new fan and
    /// the index of the new ray (always the last one).
    pub fn star_subdivision(&self, sigma: &Cone, new_label: Option<&str>) -> Result<(Fan, usize)> {
        if sigma.dim() < 2 {
            return Err(Error::Domain("star subdivision needs a cone of dimension at least 2".into()));
        }
        if sigma.rays().iter().any(|&r| r >= self.rays.len()) || !self.is_face_mask(sigma.mask()) {
            return Err(Error::Domain(format!(
                "{} is not a cone of the fan",
                self.cone_label_lossy(sigma)
            )));
        }
        let mut v = vec![0i64; self.dim];
        for &r in sigma.rays() {
            for (x, y) in v.iter_mut().zip(&self.rays[r]) {
                *x = x.checked_add(*y).ok_or(Error::Overflow("star subdivision"))?;
            }
        }
        let new = self.rays.len();
        let label = match new_label {
            Some(l) => l.to_string(),
            None => {
                let mut cand = "E".to_string();
                let mut k = 1;
                while self.ray_index(&cand).is_some() {
                    k += 1;
                    cand = format!("E{k}");
                }
                cand
            }
        };
        let mut rays = self.rays.clone();
        rays.push(v);
        let mut labels = self.labels.clone();
        labels.push(label);
        let mut cones = Vec::new();
        for theta in &self.max_cones {
            if !sigma.is_subset_of(theta) {
                cones.push(theta.rays().to_vec());
                continue;
            }
            for &r in sigma.rays() {
                let mut c: Vec<usize> = theta.rays().iter().copied().filter(|&x| x != r).collect();
                c.push(new);
                cones.push(c);
            }
        }
        let fan = Fan::new(self.dim, rays, cones, Some(labels), Validation::Trusted)?;
        Ok((fan, new))
    }

    fn cone_label_lossy(&self, cone: &Cone) -> String {
        let names: Vec<String> = cone
            .rays()
            .iter()
            .map(|&r| self.labels.get(r).cloned().unwrap_or_else(|| format!("#{r}")))
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// `{"dim":2,"rays":[[1,0],...],"max_cones":[[0,1],...],"labels":[...]}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FanFile {
            dim: self.dim,
            rays: self.rays.clone(),
            max_cones: self.max_cones.iter().map(|c| c.rays().to_vec()).collect(),
            labels: Some(self.labels.clone()),
        })
        .expect("fan serializes")
    }

    pub fn from_json(value: &serde_json::Value, mode: Validation) -> Result<Self> {
        let file: FanFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("fan file: {e}")))?;
        for (i, r) in file.rays.iter().enumerate() {
            if r.len() != file.dim {
                return Err(Error::InvalidFan(FanIssue::WrongLength { ray: i }.to_string()));
            }
        }
        Fan::new(file.dim, file.rays, file.max_cones, file.labels, mode)
    }

    /// Built-in fans: `p1`, `pn:N`, `dp6`, `hirzebruch:R`, `affine:N`.
    pub fn catalog(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let int_arg = |lo: i64| -> Result<i64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("catalog fan `{head}` needs an argument")))?;
            let n: i64 = a
                .parse()
                .map_err(|_| Error::Parse(format!("bad catalog argument `{a}`")))?;
            if n < lo {
                return Err(Error::Parse(format!("catalog argument must be at least {lo}")));
            }
            Ok(n)
        };
        match head {
            "p1" => projective_space(1),
            "pn" => projective_space(int_arg(1)? as usize),
            "dp6" => {
                let rays = vec![
                    vec![0, 1],
                    vec![1, 1],
                    vec![1, 0],
                    vec![0, -1],
                    vec![-1, -1],
                    vec![-1, 0],
                ];
                let labels = ["L1", "E3", "L2", "E1", "L3", "E2"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect();
                let cones = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
                Fan::new(2, rays, cones, Some(labels), Validation::Trusted)
            }
            "hirzebruch" => {
                let r = int_arg(0)?;
                let rays = vec![vec![1, 0], vec![0, 1], vec![-1, r], vec![0, -1]];
                let cones = (0..4).map(|i| vec![i, (i + 1) % 4]).collect();
                Fan::new(2, rays, cones, Some(var_labels(4)), Validation::Trusted)
            }
            "affine" => {
                let n = int_arg(0)? as usize;
                let rays = lattice::identity(n);
                Fan::new(n, rays, vec![(0..n).collect()], Some(var_labels(n)), Validation::Trusted)
            }
            _ => Err(Error::Parse(format!("unknown catalog fan `{name}`"))),
        }
    }
}

fn var_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Fan of `P^n`: rays `e_1, ..., e_n, -(e_1 + ... + e_n)`, maximal cones
/// all `n`-subsets.
pub fn projective_space(n: usize) -> Result<Fan> {
    if n == 0 {
        return Err(Error::Domain("P^0 has no rays".into()));
    }
    let mut rays = lattice::identity(n);
    rays.push(vec![-1; n]);
    let cones = (0..=n)
        .rev()
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    Fan::new(n, rays, cones, Some(var_labels(n + 1)), Validation::Trusted)
}

/// Checks primitivity, distinctness, smoothness, non-containment and (in
/// strict mode) that every pair of maximal cones meets in a common face.
pub fn validate_fan(fan: &Fan, mode: Validation) -> ValidationReport {
    let mut issues = Vec::new();
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != fan.dim {
            issues.push(FanIssue::WrongLength { ray: i });
            continue;
        }
        let g = r.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            issues.push(FanIssue::ZeroRay { ray: i });
        } else if g != 1 {
            issues.push(FanIssue::NonPrimitive { ray: i });
        }
        if let Some(j) = fan.rays[..i].iter().position(|s| s == r) {
            issues.push(FanIssue::DuplicateRay { first: j, second: i });
        }
    }
    if !issues.is_empty() {
        return ValidationReport { issues };
    }
    for (c, cone) in fan.max_cones.iter().enumerate() {
        if cone.dim() == 0 {
            issues.push(FanIssue::EmptyCone { cone: c });
            continue;
        }
        if cone.dim() > fan.dim {
            issues.push(FanIssue::NonSmooth { cone: c });
            continue;
        }
        let smooth = lattice::smith_normal_form(&fan.ray_matrix(cone), fan.dim)
            .map(|s: SnfResult| s.diagonal.iter().all(|&d| d == 1))
            .unwrap_or(false);
        if !smooth {
            issues.push(FanIssue::NonSmooth { cone: c });
        }
    }
    for (i, a) in fan.max_cones.iter().enumerate() {
        for (j, b) in fan.max_cones.iter().enumerate() {
            if i != j && a.is_subset_of(b) && (a != b || i < j) {
                issues.push(FanIssue::Contained { inner: i, outer: j });
            }
        }
    }
    if mode == Validation::Strict && issues.is_empty() {
        for i in 0..fan.max_cones.len() {
            for j in i + 1..fan.max_cones.len() {
                let (a, b) = (&fan.max_cones[i], &fan.max_cones[j]);
                let common = a.mask() & b.mask();
                let zero: Vec<&[i64]> = Cone::from_mask(common).rays().iter().map(|&r| fan.ray(r)).collect();
                let pos: Vec<&[i64]> = a.rays().iter().filter(|&&r| !b.contains_ray(r)).map(|&r| fan.ray(r)).collect();
                let neg: Vec<&[i64]> = b.rays().iter().filter(|&&r| !a.contains_ray(r)).map(|&r| fan.ray(r)).collect();
                if !lattice::separating_functional_exists(fan.dim, &zero, &pos, &neg) {
                    issues.push(FanIssue::BadIntersection { first: i, second: j });
                }
            }
        }
    }
    ValidationReport { issues }
}

/// Cokernel of the character-to-divisor map via its Smith normal form.
#[derive(Debug, Clone)]
pub struct PicardPresentation {
    /// Nonzero diagonal entries of the Smith normal form (including ones).
    pub invariant_factors: Vec<i64>,
    /// Invariant factors greater than one.
    pub torsion: Vec<i64>,
    pub free_rank: usize,
    /// Whether characters inject into divisors.
    pub injective: bool,
    /// Each row is a linear functional on divisor coefficient vectors giving
    /// one Picard coordinate: first the torsion coordinates (read modulo the
    /// matching entry of `torsion`), then the free ones.
    pub coordinates: IntMatrix,
    pub snf: SnfResult,
}

impl PicardPresentation {
    /// Picard coordinates of a divisor `sum n_rho D_rho`.
    pub fn class_of(&self, divisor: &[i64]) -> Vec<i64> {
        self.coordinates
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let x: i64 = row.iter().zip(divisor).map(|(a, b)| a * b).sum();
                match self.torsion.get(k) {
                    Some(&d) => x.rem_euclid(d),
                    None => x,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_is_valid_strict() {
        let f = Fan::catalog("pn:2").unwrap();
        assert!(validate_fan(&f, Validation::Strict).is_valid());
        assert_eq!(f.minimal_nonfaces(), vec![Cone::new(vec![0, 1, 2])]);
    }

    #[test]
    fn non_primitive_ray_rejected() {
        let r = Fan::new(2, vec![vec![2, 4], vec![0, 1]], vec![vec![0], vec![1]], None, Validation::Strict);
        assert!(matches!(r, Err(Error::InvalidFan(m)) if m.contains("primitive")));
    }

    #[test]
    fn skewed_smooth_cone() {
        // det [[1,2],[0,1]] = 1
        let f = Fan::new(2, vec![vec![1, 2], vec![0, 1]], vec![vec![0, 1]], None, Validation::Strict);
        assert!(f.is_ok());
        let g = Fan::new(2, vec![vec![1, 2], vec![1, 0]], vec![vec![0, 1]], None, Validation::Strict);
        assert!(g.is_err());
    }

    #[test]
    fn overlapping_cones_rejected_only_in_strict_mode() {
        let rays = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
        let cones = vec![vec![0, 1], vec![1, 2]];
        assert!(Fan::new(2, rays.clone(), cones.clone(), None, Validation::Trusted).is_ok());
        let err = Fan::new(2, rays, cones, None, Validation::Strict).unwrap_err();
        assert!(err.to_string().contains("common face"));
    }

    #[test]
    fn containment_rejected() {
        let r = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![0]], None, Validation::Trusted);
        assert!(r.is_err());
    }

    #[test]
    fn dp6_nonfaces() {
        let f = Fan::catalog("dp6").unwrap();
        assert!(validate_fan(&f, Validation::Strict).is_valid());
        let nf = f.minimal_nonfaces();
        assert_eq!(nf.len(), 9);
        assert!(nf.iter().all(|c| c.dim() == 2));
        let named: HashSet<(String, String)> = nf
            .iter()
            .map(|c| {
                let mut v = vec![f.label(c.rays()[0]).to_string(), f.label(c.rays()[1]).to_string()];
                v.sort();
                (v[0].clone(), v[1].clone())
            })
            .collect();
        for (a, b) in [
            ("L1", "L2"), ("L1", "L3"), ("L2", "L3"),
            ("E1", "E2"), ("E1", "E3"), ("E2", "E3"),
            ("E1", "L1"), ("E2", "L2"), ("E3", "L3"),
        ] {
            assert!(named.contains(&(a.to_string(), b.to_string())), "{a}{b}");
        }
    }

    #[test]
    fn single_cone_has_no_nonfaces() {
        let f = Fan::catalog("affine:3").unwrap();
        assert!(f.minimal_nonfaces().is_empty());
        let pic = f.picard_presentation().unwrap();
        assert_eq!(pic.free_rank, 0);
        assert!(pic.torsion.is_empty());
    }

    #[test]
    fn dual_bases() {
        let f = Fan::new(2, vec![vec![1, 0], vec![1, 1]], vec![vec![0, 1]], None, Validation::Strict).unwrap();
        let d = f.dual_basis(&Cone::new(vec![0, 1])).unwrap();
        assert_eq!(d[&0], vec![1, -1]);
        assert_eq!(d[&1], vec![0, 1]);

        let p2 = Fan::catalog("pn:2").unwrap();
        let d = p2.dual_basis(&Cone::new(vec![0, 1])).unwrap();
        assert_eq!(d[&0], vec![1, 0]);
        assert_eq!(d[&1], vec![0, 1]);
        let pairing: i64 = d[&0].iter().zip(p2.ray(2)).map(|(a, b)| a * b).sum();
        assert_eq!(pairing, -1);
        assert!(p2.dual_basis(&Cone::new(vec![0])).is_err());
    }

    #[test]
    fn picard_groups() {
        let p2 = Fan::catalog("pn:2").unwrap();
        assert_eq!(p2.char_divisor_map(), vec![vec![1, 0], vec![0, 1], vec![-1, -1]]);
        let pic = p2.picard_presentation().unwrap();
        assert_eq!(pic.invariant_factors, vec![1, 1]);
        assert_eq!((pic.free_rank, pic.torsion.len()), (1, 0));
        // all three lines are linearly equivalent
        assert_eq!(pic.class_of(&[1, 0, 0]), pic.class_of(&[0, 0, 1]));
        let dp6 = Fan::catalog("dp6").unwrap();
        let pic = dp6.picard_presentation().unwrap();
        assert_eq!((pic.free_rank, pic.torsion.len()), (4, 0));
        assert!(pic.injective);
    }

    #[test]
    fn subdivision_of_p2() {
        let p2 = Fan::catalog("pn:2").unwrap();
        let (f, e) = p2.star_subdivision(&Cone::new(vec![0, 1]), None).unwrap();
        assert_eq!(e, 3);
        assert_eq!(f.ray(e), &[1, 1]);
        assert_eq!(f.max_cones().len(), 4);
        assert!(validate_fan(&f, Validation::Strict).is_valid());
        assert!(f.minimal_nonfaces().contains(&Cone::new(vec![0, 1])));
        assert!(p2.star_subdivision(&Cone::new(vec![0]), None).is_err());
    }

    #[test]
    fn three_blowups_of_p2_give_dp6() {
        let mut f = Fan::catalog("pn:2").unwrap();
        for c in [[0usize, 1], [1, 2], [0, 2]] {
            f = f.star_subdivision(&Cone::new(c.to_vec()), None).unwrap().0;
        }
        assert!(validate_fan(&f, Validation::Strict).is_valid());
        let mut rays: Vec<_> = f.rays().to_vec();
        rays.sort();
        let mut want: Vec<_> = Fan::catalog("dp6").unwrap().rays().to_vec();
        want.sort();
        assert_eq!(rays, want);
        assert_eq!(f.max_cones().len(), 6);
        assert_eq!(f.minimal_nonfaces().len(), 9);
    }

    #[test]
    fn json_roundtrip() {
        for name in ["p1", "pn:2", "pn:3", "dp6", "hirzebruch:2"] {
            let f = Fan::catalog(name).unwrap();
            let back = Fan::from_json(&f.to_json(), Validation::Strict).unwrap();
            assert_eq!(back, f);
        }
    }
}

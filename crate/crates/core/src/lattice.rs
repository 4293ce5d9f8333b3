//! Integer linear algebra: Smith normal form, row-echelon lattices over the
//! integers, and a small exact rational simplex for feasibility questions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            if row.len() != inner {
                return Err(Error::Structural("matrix dimensions do not agree".into()));
            }
            (0..cols)
                .map(|j| {
                    (0..inner).try_fold(0i64, |acc, k| {
                        row[k]
                            .checked_mul(b[k][j])
                            .and_then(|p| acc.checked_add(p))
                            .ok_or(Error::Overflow("matrix product"))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Exact determinant of a square matrix (fraction-free elimination).
pub fn determinant(a: &IntMatrix) -> BigInt {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &m[n - 1][n - 1]
    }
}

/// `U * M * V = diag(d_1, ..., d_r, 0, ...)` with `U`, `V` unimodular and
/// `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of length `min(rows, cols)`; nonzero entries come first.
    pub diagonal: Vec<i64>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|&&d| d != 0).count()
    }

    /// The full `rows x cols` diagonal matrix.
    pub fn d_matrix(&self) -> IntMatrix {
        let rows = self.u.len();
        let cols = self.v.len();
        let mut d = vec![vec![0; cols]; rows];
        for (i, &x) in self.diagonal.iter().enumerate() {
            d[i][i] = x;
        }
        d
    }
}

fn ck(x: Option<i64>) -> Result<i64> {
    x.ok_or(Error::Overflow("Smith normal form"))
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: i64) -> Result<()> {
    for j in 0..m[dst].len() {
        let v = ck(m[src][j].checked_mul(q))?;
        m[dst][j] = ck(m[dst][j].checked_sub(v))?;
    }
    Ok(())
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: i64) -> Result<()> {
    for row in m.iter_mut() {
        let v = ck(row[src].checked_mul(q))?;
        row[dst] = ck(row[dst].checked_sub(v))?;
    }
    Ok(())
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form. Pivot: smallest absolute value in the remaining
/// submatrix, ties broken by row index and then column index.
pub fn smith_normal_form(m: &IntMatrix, cols: usize) -> Result<SnfResult> {
    let rows = m.len();
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Structural("ragged matrix".into()));
    }
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                let diagonal = (0..steps).map(|k| a[k][k]).collect();
                return Ok(SnfResult { u, v, diagonal });
            };
            a.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut v, t, pj);
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t] / p;
                if q != 0 {
                    row_axpy(&mut a, i, t, q)?;
                    row_axpy(&mut u, i, t, q)?;
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                if q != 0 {
                    col_axpy(&mut a, j, t, q)?;
                    col_axpy(&mut v, j, t, q)?;
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_axpy(&mut a, t, i, -1)?;
                    row_axpy(&mut u, t, i, -1)?;
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diagonal = (0..steps).map(|k| a[k][k]).collect();
    Ok(SnfResult { u, v, diagonal })
}

/// Inverse of a unimodular square matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    let n = m.len();
    let snf = smith_normal_form(m, n)?;
    if snf.diagonal.iter().any(|&d| d != 1) {
        return Err(Error::Domain("matrix is not unimodular".into()));
    }
    // U M V = I  =>  M^-1 = V U
    mat_mul(&snf.v, &snf.u)
}

/// A sublattice of `Z^n` kept in row-echelon form. Rows are keyed by their
/// pivot column.
#[derive(Debug, Clone)]
pub struct EchelonLattice {
    width: usize,
    rows: BTreeMap<usize, Vec<BigInt>>,
}

impl EchelonLattice {
    pub fn new(width: usize) -> Self {
        EchelonLattice {
            width,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Adds a generator, keeping the echelon form via unimodular 2x2 moves.
    pub fn insert(&mut self, mut vec: Vec<BigInt>) {
        assert_eq!(vec.len(), self.width, "vector width");
        let mut c = 0;
        while c < self.width {
            if vec[c].is_zero() {
                c += 1;
                continue;
            }
            match self.rows.get_mut(&c) {
                None => {
                    if vec[c].is_negative() {
                        for x in vec.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.rows.insert(c, vec);
                    return;
                }
                Some(row) => {
                    let a = row[c].clone();
                    let b = vec[c].clone();
                    if (&b % &a).is_zero() {
                        let q = &b / &a;
                        for (x, r) in vec.iter_mut().zip(row.iter()) {
                            *x -= &q * r;
                        }
                    } else {
                        let e = a.extended_gcd(&b);
                        let (g, s, t) = (e.gcd, e.x, e.y);
                        let ag = &a / &g;
                        let bg = &b / &g;
                        let new_row: Vec<BigInt> = row
                            .iter()
                            .zip(vec.iter())
                            .map(|(r, x)| &s * r + &t * x)
                            .collect();
                        let new_vec: Vec<BigInt> = row
                            .iter()
                            .zip(vec.iter())
                            .map(|(r, x)| &ag * x - &bg * r)
                            .collect();
                        *row = new_row;
                        vec = new_vec;
                    }
                    c += 1;
                }
            }
        }
    }

    /// Whether `target` is an integral combination of the generators.
    pub fn contains(&self, target: &[BigInt]) -> bool {
        let mut t = target.to_vec();
        for c in 0..self.width {
            if t[c].is_zero() {
                continue;
            }
            let Some(row) = self.rows.get(&c) else {
                return false;
            };
            if !(&t[c] % &row[c]).is_zero() {
                return false;
            }
            let q = &t[c] / &row[c];
            for (x, r) in t.iter_mut().zip(row.iter()) {
                *x -= &q * r;
            }
        }
        true
    }
}

/// Rank over the rationals of a list of integer vectors.
pub fn rank_of(vectors: &[Vec<BigInt>], width: usize) -> usize {
    let mut lat = EchelonLattice::new(width);
    for v in vectors {
        lat.insert(v.clone());
    }
    lat.rank()
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Decides whether `{x >= 0 : A x = b}` is nonempty (phase one of the
/// simplex method with Bland's rule, exact arithmetic).
pub fn feasible_nonnegative(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    // tableau columns: n original, m artificial, then rhs
    let width = n + m + 1;
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            row[j] = if flip { -&a[i][j] } else { a[i][j].clone() };
        }
        row[n + i] = BigRational::one();
        row[width - 1] = if flip { -&b[i] } else { b[i].clone() };
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of minimising the sum of artificials
    let mut cost = vec![BigRational::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let cur = &tab[l][width - 1] / &tab[l][enter];
                        ratio < cur || (ratio == cur && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // unbounded direction cannot occur when minimising a nonnegative sum
            break;
        };
        let piv = tab[r][enter].clone();
        for x in tab[r].iter_mut() {
            *x /= &piv;
        }
        let prow = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&prow) {
                *x -= &f * p;
            }
        }
        basis[r] = enter;
    }
    cost[width - 1].is_zero()
}

/// Whether some `h` in `Q^n` satisfies `h.e = 0` for `e` in `zero`,
/// `h.p >= 1` for `p` in `pos`, and `h.q <= -1` for `q` in `neg`.
pub fn separating_functional_exists(
    dim: usize,
    zero: &[&[i64]],
    pos: &[&[i64]],
    neg: &[&[i64]],
) -> bool {
    // h = h+ - h-, one slack per inequality
    let nslack = pos.len() + neg.len();
    let ncols = 2 * dim + nslack;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut push = |v: &[i64], sign: i64, slack: Option<usize>, rhs: i64| {
        let mut row = vec![BigRational::zero(); ncols];
        for k in 0..dim {
            row[k] = rat(sign * v[k]);
            row[dim + k] = rat(-sign * v[k]);
        }
        if let Some(s) = slack {
            row[2 * dim + s] = rat(-1);
        }
        a.push(row);
        b.push(rat(rhs));
    };
    for v in zero {
        push(v, 1, None, 0);
    }
    for (s, v) in pos.iter().enumerate() {
        push(v, 1, Some(s), 1);
    }
    for (s, v) in neg.iter().enumerate() {
        push(v, -1, Some(pos.len() + s), 1);
    }
    feasible_nonnegative(&a, &b)
}

/// Solves `sum_k c_k * vectors[k] = target` over the rationals; `None` when
/// there is no solution. The vectors must be linearly independent.
pub fn solve_coordinates(vectors: &[&[i64]], target: &[i64]) -> Option<Vec<BigRational>> {
    let k = vectors.len();
    let n = target.len();
    // augmented system: n equations, k unknowns
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = vectors.iter().map(|v| rat(v[i])).collect();
            row.push(rat(target[i]));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x /= &piv;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut out = vec![BigRational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        out[c] = m[i][k].clone();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix, cols: usize) -> SnfResult {
        let s = smith_normal_form(m, cols).unwrap();
        let lhs = mat_mul(&mat_mul(&s.u, m).unwrap(), &s.v).unwrap();
        assert_eq!(lhs, s.d_matrix());
        assert!(determinant(&s.u).abs().is_one());
        assert!(determinant(&s.v).abs().is_one());
        for w in s.diagonal.windows(2) {
            if w[1] != 0 {
                assert_eq!(w[1] % w[0], 0);
            }
        }
        s
    }

    #[test]
    fn snf_identity() {
        let s = check_snf(&identity(3), 3);
        assert_eq!(s.diagonal, vec![1, 1, 1]);
        assert_eq!(s.u, identity(3));
        assert_eq!(s.v, identity(3));
    }

    #[test]
    fn snf_diag_two_three() {
        // d1 = gcd = 1, d1 * d2 = |det| = 6
        let s = check_snf(&vec![vec![2, 0], vec![0, 3]], 2);
        assert_eq!(s.diagonal, vec![1, 6]);
    }

    #[test]
    fn snf_of_character_matrix() {
        // rows E1, E2, E3, L1, L2, L3; columns x, y
        let m = vec![
            vec![0, -1],
            vec![-1, 0],
            vec![1, 1],
            vec![0, 1],
            vec![1, 0],
            vec![-1, -1],
        ];
        assert_eq!(determinant(&vec![m[0].clone(), m[1].clone()]), BigInt::from(-1));
        let s = check_snf(&m, 2);
        assert_eq!(s.diagonal, vec![1, 1]);
    }

    #[test]
    fn snf_rank_deficient() {
        let s = check_snf(&vec![vec![2, 4, 6], vec![1, 2, 3]], 3);
        assert_eq!(s.diagonal, vec![1, 0]);
        assert_eq!(s.rank(), 1);
        let s = check_snf(&vec![vec![4, 6], vec![6, 9], vec![10, 4]], 2);
        assert_eq!(s.rank(), 2);
        assert!(check_snf(&vec![], 0).diagonal.is_empty());
    }

    #[test]
    fn echelon_membership() {
        let z = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        let mut lat = EchelonLattice::new(2);
        lat.insert(z(&[2, 0]));
        lat.insert(z(&[3, 1]));
        assert_eq!(lat.rank(), 2);
        assert!(lat.contains(&z(&[1, 1])));
        assert!(lat.contains(&z(&[0, 2])));
        assert!(!lat.contains(&z(&[0, 1])));
        let mut lat = EchelonLattice::new(2);
        lat.insert(z(&[2, 0]));
        assert!(!lat.contains(&z(&[1, 0])));
        assert!(!lat.contains(&z(&[0, 1])));
        assert!(lat.contains(&z(&[-4, 0])));
    }

    #[test]
    fn separation() {
        let e1: &[i64] = &[1, 0];
        let e2: &[i64] = &[0, 1];
        let m: &[i64] = &[-1, -1];
        let d: &[i64] = &[1, 1];
        // cone(e1,e2) and cone(e2,-e1-e2) meet along e2
        assert!(separating_functional_exists(2, &[e2], &[e1], &[m]));
        // cone(e1,e2) and cone(e2, e1+e2) overlap
        assert!(!separating_functional_exists(2, &[e2], &[e1], &[d]));
    }

    #[test]
    fn coordinates() {
        let v1: &[i64] = &[1, 0];
        let v2: &[i64] = &[1, 1];
        let c = solve_coordinates(&[v1, v2], &[3, 2]).unwrap();
        assert_eq!(c, vec![rat(1), rat(2)]);
        assert!(solve_coordinates(&[v1], &[0, 1]).is_none());
    }
}

//! Small exact linear algebra: integer kernels and Hermite form for lattice
//! work, Gaussian elimination over the rationals for ranks and wall relations.
//!
//! Everything here is written for the sizes that occur in fan combinatorics
//! (a handful of rays in dimension at most four) and in Morse-complex rank
//! counts (hundreds of generators); no asymptotic cleverness is attempted.

use crate::rational::Rational;
use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

/// Basis of the integer kernel { x : A x = 0 } of an r-by-c matrix.
///
/// Column reduction by unimodular operations; the returned basis is saturated
/// (it spans the full kernel lattice, not a finite-index sublattice) and is
/// put into Hermite normal form for determinism.
pub fn integer_kernel(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut work: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    // u is kept as columns: u[j] is the j-th column of the accumulated
    // unimodular matrix, so A * (columns of u) = columns of work.
    let mut lead = 0usize;
    for r in 0..rows {
        if lead >= cols {
            break;
        }
        loop {
            let pivot = (lead..cols)
                .filter(|j| !work_entry(&work, r, *j).is_zero())
                .min_by_key(|j| work_entry(&work, r, *j).magnitude().clone());
            let Some(p) = pivot else { break };
            if p != lead {
                for row in work.iter_mut() {
                    row.swap(p, lead);
                }
                u.swap(p, lead);
            }
            let mut done = true;
            for j in lead + 1..cols {
                let q = div_round(&work[r][j], &work[r][lead]);
                if !q.is_zero() {
                    for row in work.iter_mut() {
                        let t = &row[lead] * &q;
                        row[j] -= t;
                    }
                    let uc: Vec<BigInt> = u[lead].iter().map(|x| x * &q).collect();
                    for (t, s) in u[j].iter_mut().zip(uc) {
                        *t -= s;
                    }
                }
                if !work[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !work[r][lead].is_zero() {
            lead += 1;
        }
    }
    let kernel: Vec<Vec<BigInt>> = (lead..cols)
        .filter(|j| (0..rows).all(|r| work[r][*j].is_zero()))
        .map(|j| u[j].clone())
        .collect();
    hermite_rows(kernel)
}

fn work_entry<'a>(work: &'a [Vec<BigInt>], r: usize, j: usize) -> &'a BigInt {
    &work[r][j]
}

/// Nearest-integer quotient, which keeps the gcd descent fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let half = if (a.sign() == b.sign()) || a.is_zero() {
        b / &two
    } else {
        -(b / &two)
    };
    (a + half) / b
}

/// Row Hermite normal form: positive pivots, entries above a pivot reduced
/// into [0, pivot). Rows of zeros are dropped. The result is a canonical
/// basis of the row lattice.
pub fn hermite_rows(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    m.retain(|r| r.iter().any(|x| !x.is_zero()));
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut top = 0usize;
    for col in 0..cols {
        loop {
            let pivot = (top..m.len())
                .filter(|i| !m[*i][col].is_zero())
                .min_by_key(|i| m[*i][col].magnitude().clone());
            let Some(p) = pivot else { break };
            m.swap(top, p);
            let mut done = true;
            for i in top + 1..m.len() {
                let q = div_round(&m[i][col], &m[top][col]);
                if !q.is_zero() {
                    let sub: Vec<BigInt> = m[top].iter().map(|x| x * &q).collect();
                    for (t, s) in m[i].iter_mut().zip(sub) {
                        *t -= s;
                    }
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if top < m.len() && !m[top][col].is_zero() {
            if m[top][col].is_negative() {
                for x in m[top].iter_mut() {
                    *x = -x.clone();
                }
            }
            let pivot = m[top][col].clone();
            for i in 0..top {
                let q = num::Integer::div_floor(&m[i][col], &pivot);
                if !q.is_zero() {
                    let sub: Vec<BigInt> = m[top].iter().map(|x| x * &q).collect();
                    for (t, s) in m[i].iter_mut().zip(sub) {
                        *t -= s;
                    }
                }
            }
            top += 1;
        }
    }
    m.truncate(top);
    m
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn integer_det(a: &[Vec<BigInt>]) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|i| !m[*i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Do the rows of `rows` (k of them, in dimension d) extend to a basis of
/// the integer lattice? Equivalent to the gcd of all k-by-k minors being 1.
pub fn extends_to_basis(rows: &[Vec<i64>], dim: usize) -> bool {
    let k = rows.len();
    if k == 0 {
        return true;
    }
    if k > dim {
        return false;
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
        .collect();
    let mut g = BigInt::zero();
    for cols in subsets(dim, k) {
        let minor: Vec<Vec<BigInt>> = big
            .iter()
            .map(|r| cols.iter().map(|c| r[*c].clone()).collect())
            .collect();
        g = num::Integer::gcd(&g, &integer_det(&minor));
        if g.is_one() {
            return true;
        }
    }
    g.is_one()
}

/// All k-element subsets of {0, .., n-1}, each ascending.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Rank of a rational matrix, by destructive Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|i| !m[*i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone().recip();
        for j in col..cols {
            let t = &m[rank][j] * &inv;
            m[rank][j] = t;
        }
        for i in 0..rows {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..cols {
                    let t = &m[rank][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub enum LinSolve {
    Unique(Vec<Rational>),
    Inconsistent,
    Underdetermined,
}

/// Solve A x = b for an r-by-k rational matrix A.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> LinSolve {
    let rows = a.len();
    let k = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for col in 0..k {
        let Some(p) = (rank..rows).find(|i| !m[*i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone().recip();
        for j in col..=k {
            let t = &m[rank][j] * &inv;
            m[rank][j] = t;
        }
        for i in 0..rows {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=k {
                    let t = &m[rank][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    for row in m.iter().skip(rank) {
        if !row[k].is_zero() {
            return LinSolve::Inconsistent;
        }
    }
    if rank < k {
        return LinSolve::Underdetermined;
    }
    let mut x = vec![Rational::zero(); k];
    for (r, c) in pivots {
        x[c] = m[r][k].clone();
    }
    LinSolve::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
            .collect()
    }

    #[test]
    fn kernel_of_projective_plane_rays() {
        // rows of A are coordinates; kernel of the transpose relation:
        // A maps coefficient vectors to sum of rays.
        let a = bi(&[&[1, 0, -1], &[0, 1, -1]]);
        let k = integer_kernel(&a);
        assert_eq!(k, bi(&[&[1, 1, 1]]));
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of [2 4] is generated by (2, -1), not (4, -2)
        let k = integer_kernel(&bi(&[&[2, 4]]));
        assert_eq!(k, bi(&[&[2, -1]]));
    }

    #[test]
    fn kernel_rank_two() {
        // Hirzebruch F2 rays as columns of the map Z^4 -> Z^2.
        let a = bi(&[&[1, 0, -1, 0], &[0, 1, 2, -1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s0 = &v[0] - &v[2];
            let s1 = &v[1] + BigInt::from(2) * &v[2] - &v[3];
            assert!(s0.is_zero() && s1.is_zero());
        }
    }

    #[test]
    fn hermite_canonicalizes() {
        let h = hermite_rows(bi(&[&[0, 1, 0, 1], &[1, -2, 1, 0]]));
        let h2 = hermite_rows(bi(&[&[1, -1, 1, 1], &[0, 1, 0, 1]]));
        assert_eq!(h, h2);
    }

    #[test]
    fn det_small() {
        assert_eq!(integer_det(&bi(&[&[1, 0], &[0, 1]])), BigInt::from(1));
        assert_eq!(integer_det(&bi(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            integer_det(&bi(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]])),
            BigInt::from(30)
        );
    }

    #[test]
    fn basis_extension() {
        assert!(extends_to_basis(&[vec![1, 0], vec![0, 1]], 2));
        assert!(extends_to_basis(&[vec![0, 1], vec![-1, 2]], 2));
        assert!(!extends_to_basis(&[vec![1, 1], vec![-1, 1]], 2));
        assert!(extends_to_basis(&[vec![2, 1]], 2));
        assert!(!extends_to_basis(&[vec![2, 4]], 2));
        assert!(extends_to_basis(&[], 2));
    }

    #[test]
    fn rational_rank_and_solve() {
        let m = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
            vec![rat_int(0), rat_int(1)],
        ];
        assert_eq!(rational_rank(m), 2);
        let a = vec![vec![rat_int(2)], vec![rat_int(0)]];
        match solve_exact(&a, &[rat_int(3), rat_int(0)]) {
            LinSolve::Unique(x) => assert_eq!(x, vec![rat(3, 2)]),
            _ => panic!("expected unique"),
        }
        match solve_exact(&a, &[rat_int(3), rat_int(1)]) {
            LinSolve::Inconsistent => {}
            _ => panic!("expected inconsistent"),
        }
    }
}

//! Graded linear algebra over form entries, plus exact rational solving.
//!
//! Supermatrices are 2x2 block matrices over [`Form`] entries with a parity
//! tag. The supertranspose convention is pinned by two golden cases: the
//! even matrix `[[R,S],[T,U]]` goes to `[[R^t,-T^t],[S^t,U^t]]` and the odd
//! matrix `[[P,-H],[H^t,0]]` goes to `[[P^t,H],[-H^t,0]]`.

use std::fmt;
use std::sync::Arc;

use num::{One, Zero};

use crate::form::Form;
use crate::poly::{ParamSet, Poly, Rat};
use crate::{Error, Result};

pub type Block = Vec<Vec<Form>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn xor(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

fn block_zero(n: usize, m: usize, params: &Arc<ParamSet>) -> Block {
    vec![vec![Form::zero(m, params); n]; n]
}

fn block_map(x: &Block, f: impl Fn(&Form) -> Form) -> Block {
    x.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn block_add(x: &Block, y: &Block) -> Block {
    x.iter()
        .zip(y)
        .map(|(rx, ry)| rx.iter().zip(ry).map(|(a, b)| a + b).collect())
        .collect()
}

fn block_transpose(x: &Block) -> Block {
    let n = x.len();
    (0..n).map(|i| (0..n).map(|j| x[j][i].clone()).collect()).collect()
}

fn block_mul(x: &Block, y: &Block) -> Block {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Form::zero(x[0][0].dim(), x[0][0].params());
                    for k in 0..n {
                        acc = &acc + &x[i][k].wedge(&y[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn block_trace(x: &Block) -> Form {
    let mut acc = Form::zero(x[0][0].dim(), x[0][0].params());
    for (i, row) in x.iter().enumerate() {
        acc = &acc + &row[i];
    }
    acc
}

/// Exact inverse of a block whose entries are constant rationals.
///
/// Entries of positive form degree or with live parameters are rejected:
/// inversion stays inside the coefficient field.
pub fn block_rational_inverse(x: &Block, which: &'static str) -> Result<Block> {
    let n = x.len();
    let m = x[0][0].dim();
    let params = x[0][0].params().clone();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for row in x {
        let mut r = Vec::with_capacity(n);
        for e in row {
            r.push(e.as_constant().ok_or(Error::SingularBlock(which))?);
        }
        a.push(r);
    }
    let inv = rational_inverse(&a).ok_or(Error::SingularBlock(which))?;
    Ok(inv
        .into_iter()
        .map(|row| row.into_iter().map(|c| Form::constant(m, &params, c)).collect())
        .collect())
}

/// Parity-tagged 2x2 block matrix over form entries.
///
/// Rows and columns are indexed by a pure basis: the even block first, the
/// odd block second. For an even matrix the diagonal blocks carry even
/// entries; for an odd one the roles swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperMatrix {
    pub n: usize,
    pub parity: Parity,
    pub a: Block,
    pub b: Block,
    pub c: Block,
    pub d: Block,
}

impl SuperMatrix {
    pub fn new(parity: Parity, a: Block, b: Block, c: Block, d: Block) -> SuperMatrix {
        let n = a.len();
        assert!(b.len() == n && c.len() == n && d.len() == n, "block sizes differ");
        SuperMatrix { n, parity, a, b, c, d }
    }

    pub fn zero(n: usize, m: usize, params: &Arc<ParamSet>, parity: Parity) -> SuperMatrix {
        SuperMatrix {
            n,
            parity,
            a: block_zero(n, m, params),
            b: block_zero(n, m, params),
            c: block_zero(n, m, params),
            d: block_zero(n, m, params),
        }
    }

    pub fn identity(n: usize, m: usize, params: &Arc<ParamSet>) -> SuperMatrix {
        let mut s = SuperMatrix::zero(n, m, params, Parity::Even);
        for i in 0..n {
            s.a[i][i] = Form::one(m, params);
            s.d[i][i] = Form::one(m, params);
        }
        s
    }

    fn ctx(&self) -> (usize, Arc<ParamSet>) {
        (self.a[0][0].dim(), self.a[0][0].params().clone())
    }

    /// Supertranspose, normalized by the two displayed golden cases.
    pub fn stranspose(&self) -> SuperMatrix {
        let sign = self.parity.sign();
        let bt = block_map(&block_transpose(&self.c), |f| {
            if sign > 0 {
                -f
            } else {
                f.clone()
            }
        });
        let dt = block_map(&block_transpose(&self.d), |f| {
            if sign > 0 {
                f.clone()
            } else {
                -f
            }
        });
        SuperMatrix {
            n: self.n,
            parity: self.parity,
            a: block_transpose(&self.a),
            b: bt,
            c: block_transpose(&self.b),
            d: dt,
        }
    }

    /// Supertrace `Tr(A) - (-1)^{|M|} Tr(D)`.
    pub fn strace(&self) -> Form {
        let ta = block_trace(&self.a);
        let td = block_trace(&self.d);
        match self.parity {
            Parity::Even => &ta - &td,
            Parity::Odd => &ta + &td,
        }
    }

    pub fn mul(&self, rhs: &SuperMatrix) -> SuperMatrix {
        assert_eq!(self.n, rhs.n);
        let a = block_add(&block_mul(&self.a, &rhs.a), &block_mul(&self.b, &rhs.c));
        let b = block_add(&block_mul(&self.a, &rhs.b), &block_mul(&self.b, &rhs.d));
        let c = block_add(&block_mul(&self.c, &rhs.a), &block_mul(&self.d, &rhs.c));
        let d = block_add(&block_mul(&self.c, &rhs.b), &block_mul(&self.d, &rhs.d));
        SuperMatrix { n: self.n, parity: self.parity.xor(rhs.parity), a, b, c, d }
    }

    pub fn neg(&self) -> SuperMatrix {
        SuperMatrix {
            n: self.n,
            parity: self.parity,
            a: block_map(&self.a, |f| -f),
            b: block_map(&self.b, |f| -f),
            c: block_map(&self.c, |f| -f),
            d: block_map(&self.d, |f| -f),
        }
    }

    pub fn sub(&self, rhs: &SuperMatrix) -> SuperMatrix {
        SuperMatrix {
            n: self.n,
            parity: self.parity,
            a: block_add(&self.a, &block_map(&rhs.a, |f| -f)),
            b: block_add(&self.b, &block_map(&rhs.b, |f| -f)),
            c: block_add(&self.c, &block_map(&rhs.c, |f| -f)),
            d: block_add(&self.d, &block_map(&rhs.d, |f| -f)),
        }
    }

    pub fn is_zero(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .all(|blk| blk.iter().all(|row| row.iter().all(Form::is_zero)))
    }

    /// Inverse of a matrix with vanishing D block and invertible constant
    /// off-diagonal blocks: `[[A,B],[C,0]]^{-1} = [[0,C^{-1}],[B^{-1},-B^{-1}AC^{-1}]]`.
    pub fn block_inverse(&self) -> Result<SuperMatrix> {
        if !self.d.iter().all(|row| row.iter().all(Form::is_zero)) {
            return Err(Error::SingularBlock("D (must vanish)"));
        }
        let b_inv = block_rational_inverse(&self.b, "B")?;
        let c_inv = block_rational_inverse(&self.c, "C")?;
        let (m, params) = self.ctx();
        let minus_binv_a_cinv =
            block_map(&block_mul(&block_mul(&b_inv, &self.a), &c_inv), |f| -f);
        Ok(SuperMatrix {
            n: self.n,
            parity: self.parity,
            a: block_zero(self.n, m, &params),
            b: c_inv,
            c: b_inv,
            d: minus_binv_a_cinv,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let blk = |x: &Block| -> serde_json::Value {
            serde_json::json!(x
                .iter()
                .map(|row| row.iter().map(Form::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>())
        };
        serde_json::json!({
            "supermatrix": {
                "parity": match self.parity { Parity::Even => "even", Parity::Odd => "odd" },
                "a": blk(&self.a), "b": blk(&self.b), "c": blk(&self.c), "d": blk(&self.d),
            }
        })
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "parity: {:?}", self.parity)?;
        for (name, blk) in [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d)] {
            writeln!(f, "{name}:")?;
            for row in blk.iter() {
                let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Exact rational elimination
// ---------------------------------------------------------------------------

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(mat: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let factor = mat[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &mat[r][j];
                    mat[i][j] = &mat[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Basis of the nullspace of a rational matrix (columns = unknowns).
pub fn kernel_basis(mat: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut work: Vec<Vec<Rat>> = mat.to_vec();
    let pivots = rref(&mut work);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -work[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Exact inverse of a square rational matrix.
pub fn rational_inverse(mat: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = mat.len();
    let mut work: Vec<Vec<Rat>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            r
        })
        .collect();
    let pivots = rref(&mut work);
    if pivots != (0..n).collect::<Vec<_>>() {
        return None;
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `A x = b` where `A` is rational and `b` has polynomial entries.
///
/// Free variables are set to zero. Returns `None` when inconsistent.
pub fn solve_affine(mat: &[Vec<Rat>], rhs: &[Poly], cols: usize) -> Option<Vec<Poly>> {
    assert_eq!(mat.len(), rhs.len());
    let params = if rhs.is_empty() { ParamSet::empty() } else { rhs[0].params().clone() };
    let mut work: Vec<Vec<Rat>> = mat.to_vec();
    let mut b: Vec<Poly> = rhs.to_vec();
    let rows = work.len();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !work[i][c].is_zero()) else {
            continue;
        };
        work.swap(r, p);
        b.swap(r, p);
        let inv = work[r][c].recip();
        for x in work[r].iter_mut() {
            *x = &*x * &inv;
        }
        b[r] = b[r].scale(&inv);
        for i in 0..rows {
            if i != r && !work[i][c].is_zero() {
                let factor = work[i][c].clone();
                for j in 0..cols {
                    let delta = &factor * &work[r][j];
                    work[i][j] = &work[i][j] - &delta;
                }
                let delta = b[r].scale(&factor);
                b[i] = &b[i] - &delta;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // Zero rows must have zero right-hand sides.
    for i in r..rows {
        if !b[i].is_zero() {
            return None;
        }
    }
    let mut x = vec![Poly::zero(&params); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = b[row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    fn ps() -> Arc<ParamSet> {
        ParamSet::empty()
    }

    fn const_block(n: usize, m: usize, params: &Arc<ParamSet>, vals: &[&[i64]]) -> Block {
        (0..n)
            .map(|i| (0..n).map(|j| Form::constant(m, params, rat(vals[i][j]))).collect())
            .collect()
    }

    #[test]
    fn stranspose_golden_even() {
        // [[R,S],[T,U]] even -> [[R^t,-T^t],[S^t,U^t]]
        let ps = ps();
        let m = 2;
        let r = const_block(2, m, &ps, &[&[1, 2], &[3, 4]]);
        let s = const_block(2, m, &ps, &[&[5, 6], &[7, 8]]);
        let t = const_block(2, m, &ps, &[&[9, 10], &[11, 12]]);
        let u = const_block(2, m, &ps, &[&[13, 14], &[15, 16]]);
        let mat = SuperMatrix::new(Parity::Even, r.clone(), s.clone(), t.clone(), u.clone());
        let st = mat.stranspose();
        assert_eq!(st.a, block_transpose(&r));
        assert_eq!(st.b, block_map(&block_transpose(&t), |f| -f));
        assert_eq!(st.c, block_transpose(&s));
        assert_eq!(st.d, block_transpose(&u));
    }

    #[test]
    fn stranspose_golden_odd() {
        // [[P,-H],[H^t,0]] odd -> [[P^t,H],[-H^t,0]]
        let ps = ps();
        let m = 2;
        let p = const_block(2, m, &ps, &[&[0, 1], &[2, 0]]);
        let h = const_block(2, m, &ps, &[&[0, 1], &[-1, 0]]);
        let minus_h = block_map(&h, |f| -f);
        let ht = block_transpose(&h);
        let zero = const_block(2, m, &ps, &[&[0, 0], &[0, 0]]);
        let mat = SuperMatrix::new(Parity::Odd, p.clone(), minus_h, ht, zero.clone());
        let st = mat.stranspose();
        assert_eq!(st.a, block_transpose(&p));
        assert_eq!(st.b, h);
        assert_eq!(st.c, block_map(&block_transpose(&h), |f| -f));
        assert_eq!(st.d, zero);
    }

    #[test]
    fn stranspose_identity_fixed() {
        let ps = ps();
        let id = SuperMatrix::identity(3, 2, &ps);
        assert_eq!(id.stranspose(), id);
    }

    #[test]
    fn strace_of_identity() {
        let ps = ps();
        let id = SuperMatrix::identity(3, 2, &ps);
        assert!(id.strace().is_zero());
    }

    #[test]
    fn block_inverse_matches_closed_form_and_roundtrips() {
        let ps = ps();
        let m = 2;
        let a = const_block(2, m, &ps, &[&[1, 2], &[0, 1]]);
        let b = const_block(2, m, &ps, &[&[2, 0], &[1, 1]]);
        let c = const_block(2, m, &ps, &[&[0, 1], &[-1, 3]]);
        let zero = const_block(2, m, &ps, &[&[0, 0], &[0, 0]]);
        let mat = SuperMatrix::new(Parity::Odd, a, b, c, zero);
        let inv = mat.block_inverse().unwrap();
        let id = SuperMatrix::identity(2, m, &ps);
        assert_eq!(mat.mul(&inv).sub(&id).is_zero(), true);
        assert_eq!(inv.mul(&mat).sub(&id).is_zero(), true);
    }

    #[test]
    fn swap_matrix_is_involutive() {
        let ps = ps();
        let m = 2;
        let zero = const_block(2, m, &ps, &[&[0, 0], &[0, 0]]);
        let id = const_block(2, m, &ps, &[&[1, 0], &[0, 1]]);
        let mat = SuperMatrix::new(Parity::Odd, zero.clone(), id.clone(), id.clone(), zero);
        let inv = mat.block_inverse().unwrap();
        assert_eq!(inv.a, mat.a);
        assert_eq!(inv.b, mat.b);
        assert_eq!(inv.c, mat.c);
        assert_eq!(inv.d, mat.d);
    }

    #[test]
    fn kernel_of_sum_constraint() {
        // x + y = 0 has kernel spanned by (1, -1) after sign normalization.
        let mat = vec![vec![rat(1), rat(1)]];
        let basis = kernel_basis(&mat, 2);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0] == -basis[0][1].clone(), true);
        assert!(!basis[0][1].is_zero());
    }

    #[test]
    fn kernel_of_empty_system() {
        let basis = kernel_basis(&[], 3);
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x == Rat::one(), i == j);
            }
        }
    }

    #[test]
    fn affine_solve_consistency() {
        let ps = ParamSet::new(&["t"]);
        let t = Poly::param(&ps, "t").unwrap();
        // x + y = t, x - y = 0  =>  x = y = t/2
        let mat = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let rhs = vec![t.clone(), Poly::zero(&ps)];
        let x = solve_affine(&mat, &rhs, 2).unwrap();
        assert_eq!(x[0], t.scale(&ratio(1, 2)));
        assert_eq!(x[1], t.scale(&ratio(1, 2)));
        // Inconsistent system.
        let mat2 = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        let rhs2 = vec![t.clone(), Poly::zero(&ps)];
        assert!(solve_affine(&mat2, &rhs2, 2).is_none());
    }
}

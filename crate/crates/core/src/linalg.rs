//! Exact rational linear algebra: dense reduced row echelon form with a
//! pluggable right-hand side, kernel bases, and an incremental echelon
//! reducer that tracks how each reduction was formed from the inserted rows.
//!
//! Callers rely on the left-to-right column sweep: the pivot set it selects
//! is deterministic (leftmost usable column first), and the solvers built on
//! top publish that pivot structure.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::arith::Rat;
use crate::qseries::SymbolVec;

/// Data carried along with each row during elimination.
pub trait RhsOps: Clone {
    /// self -= c * other
    fn sub_scaled(&mut self, other: &Self, c: &Rat);
    fn scale(&mut self, c: &Rat);
    fn is_rhs_zero(&self) -> bool;
}

impl RhsOps for () {
    fn sub_scaled(&mut self, _other: &Self, _c: &Rat) {}
    fn scale(&mut self, _c: &Rat) {}
    fn is_rhs_zero(&self) -> bool {
        true
    }
}

impl RhsOps for Rat {
    fn sub_scaled(&mut self, other: &Self, c: &Rat) {
        *self -= other * c;
    }
    fn scale(&mut self, c: &Rat) {
        *self *= c;
    }
    fn is_rhs_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl RhsOps for Vec<Rat> {
    fn sub_scaled(&mut self, other: &Self, c: &Rat) {
        for (x, y) in self.iter_mut().zip(other) {
            *x -= y * c;
        }
    }
    fn scale(&mut self, c: &Rat) {
        for x in self.iter_mut() {
            *x *= c;
        }
    }
    fn is_rhs_zero(&self) -> bool {
        self.iter().all(Zero::is_zero)
    }
}

impl RhsOps for SymbolVec {
    fn sub_scaled(&mut self, other: &Self, c: &Rat) {
        *self = self.sub(&other.scale(c));
    }
    fn scale(&mut self, c: &Rat) {
        *self = SymbolVec::scale(self, c);
    }
    fn is_rhs_zero(&self) -> bool {
        SymbolVec::is_zero(self)
    }
}

/// A matrix in reduced row echelon form together with the transformed
/// right-hand sides. Rows at index >= rank have zero matrix part; their rhs
/// entries are whatever the eliminated original rows left behind.
#[derive(Clone, Debug)]
pub struct Reduced<R> {
    pub mat: Vec<Vec<Rat>>,
    pub rhs: Vec<R>,
    /// Column of the pivot in each of the first `rank` rows, increasing.
    pub pivots: Vec<usize>,
    pub rank: usize,
    pub ncols: usize,
}

impl<R> Reduced<R> {
    pub fn is_pivot_col(&self, col: usize) -> bool {
        self.pivots.binary_search(&col).is_ok()
    }

    pub fn free_cols(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.is_pivot_col(*c)).collect()
    }
}

/// Full reduced row echelon form, sweeping columns left to right and
/// eliminating above and below each pivot.
pub fn rref<R: RhsOps>(mut mat: Vec<Vec<Rat>>, mut rhs: Vec<R>) -> Reduced<R> {
    assert_eq!(mat.len(), rhs.len(), "one rhs per row");
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, Vec::len);
    assert!(mat.iter().all(|r| r.len() == ncols), "ragged matrix");
    let mut pivots = Vec::new();
    let mut prow = 0usize;
    for col in 0..ncols {
        if prow == nrows {
            break;
        }
        let Some(hit) = (prow..nrows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(prow, hit);
        rhs.swap(prow, hit);
        let inv = mat[prow][col].recip();
        for x in mat[prow].iter_mut() {
            *x *= &inv;
        }
        rhs[prow].scale(&inv);
        for r in 0..nrows {
            if r == prow || mat[r][col].is_zero() {
                continue;
            }
            let c = mat[r][col].clone();
            let (head, tail) = mat.split_at_mut(r.max(prow));
            let (src, dst) = if r > prow {
                (&head[prow], &mut tail[0])
            } else {
                (&tail[0], &mut head[r])
            };
            for (x, y) in dst.iter_mut().zip(src.iter()) {
                *x -= y * &c;
            }
            let src_rhs = rhs[prow].clone();
            rhs[r].sub_scaled(&src_rhs, &c);
        }
        pivots.push(col);
        prow += 1;
    }
    Reduced {
        mat,
        rhs,
        pivots,
        rank: prow,
        ncols,
    }
}

pub fn rank(mat: Vec<Vec<Rat>>) -> usize {
    let n = mat.len();
    rref(mat, vec![(); n]).rank
}

/// Basis of the right kernel {x : M x = 0}, one vector per free column,
/// with a 1 in that free column.
pub fn right_kernel(mat: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let n = mat.len();
    let red = rref(mat.to_vec(), vec![(); n]);
    let mut basis = Vec::new();
    for f in red.free_cols() {
        let mut v = vec![Rat::zero(); red.ncols];
        v[f] = Rat::one();
        for (row, &p) in red.pivots.iter().enumerate() {
            v[p] = -red.mat[row][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Basis of the left kernel {y : y M = 0}.
pub fn left_kernel(mat: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let nrows = mat.len();
    let ncols = mat.first().map_or(0, Vec::len);
    let mut t = vec![vec![Rat::zero(); nrows]; ncols];
    for (i, row) in mat.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            t[j][i] = x.clone();
        }
    }
    right_kernel(&t)
}

/// Particular solution of M x = b with all free variables set to zero, or
/// None if the system is inconsistent.
pub fn solve_dense(mat: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let red = rref(mat.to_vec(), b.to_vec());
    for r in red.rank..red.mat.len() {
        if !red.rhs[r].is_rhs_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); red.ncols];
    for (row, &p) in red.pivots.iter().enumerate() {
        x[p] = red.rhs[row].clone();
    }
    Some(x)
}

/// Incremental echelon basis over sparse rows. Each stored row remembers the
/// combination of originally inserted rows it equals, so reductions come
/// with an exact witness.
pub struct Echelon {
    ncols: usize,
    inserted: usize,
    /// lead column -> index into `rows`
    by_lead: HashMap<usize, usize>,
    rows: Vec<EchRow>,
}

struct EchRow {
    lead: usize,
    vec: Vec<Rat>,
    /// sparse combination over original insertion indices
    combo: Vec<(usize, Rat)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            inserted: 0,
            by_lead: HashMap::new(),
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Adds a row to the basis. Returns true if it was independent of the
    /// rows already present.
    pub fn insert(&mut self, row: Vec<Rat>) -> bool {
        assert_eq!(row.len(), self.ncols);
        let id = self.inserted;
        self.inserted += 1;
        let (mut residue, mut combo) = self.reduce_internal(row);
        // residue = original - sum(combo); store it as a basis row equal to
        // original minus those stored rows
        let Some(lead) = residue.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = residue[lead].recip();
        for x in residue.iter_mut() {
            *x *= &inv;
        }
        let mut full: HashMap<usize, Rat> = HashMap::new();
        full.insert(id, inv.clone());
        for (j, c) in combo.drain(..) {
            *full.entry(j).or_insert_with(Rat::zero) -= c * &inv;
        }
        let mut combo: Vec<(usize, Rat)> = full.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        combo.sort_by_key(|&(j, _)| j);
        self.by_lead.insert(lead, self.rows.len());
        self.rows.push(EchRow {
            lead,
            vec: residue,
            combo,
        });
        true
    }

    fn reduce_internal(&self, mut row: Vec<Rat>) -> (Vec<Rat>, Vec<(usize, Rat)>) {
        let mut acc: HashMap<usize, Rat> = HashMap::new();
        for col in 0..self.ncols {
            if row[col].is_zero() {
                continue;
            }
            let Some(&idx) = self.by_lead.get(&col) else {
                continue;
            };
            let c = row[col].clone();
            let er = &self.rows[idx];
            debug_assert_eq!(er.lead, col);
            for (x, y) in row.iter_mut().zip(&er.vec) {
                *x -= y * &c;
            }
            for (j, w) in &er.combo {
                *acc.entry(*j).or_insert_with(Rat::zero) += w * &c;
            }
        }
        let mut combo: Vec<(usize, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        combo.sort_by_key(|&(j, _)| j);
        (row, combo)
    }

    /// Reduces a row against the basis. Returns the residue and a witness
    /// combination such that row = residue + sum of coeff * inserted-row.
    /// A zero residue certifies membership in the span of the inserted rows.
    pub fn reduce_with_witness(&self, row: &[Rat]) -> (Vec<Rat>, Vec<(usize, Rat)>) {
        self.reduce_internal(row.to_vec())
    }
}

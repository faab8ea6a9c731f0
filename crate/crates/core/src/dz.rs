//! Formal weight-graded double zeta spaces at a given level: symbol bases,
//! the defining linear relations, exact dimensions, the even-weight sum
//! formulas as row-space membership statements, and the correspondence
//! between relations and homogeneous bivariate polynomials.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::{self, binom_rat, Rat};
use crate::linalg::Echelon;
use crate::{Error, Result};

/// gcd(a, b, N) with zero residues read as N.
fn pair_gcd(a: u32, b: u32, n: u32) -> u32 {
    let a = if a.is_multiple_of(n) { n } else { a % n };
    let b = if b.is_multiple_of(n) { n } else { b % n };
    arith::gcd_u64(arith::gcd_u64(a as u64, b as u64), n as u64) as u32
}

/// Ordered residue pairs (a, b) with gcd(a, b, N) = 1 (zero read as N).
pub fn coprime_pairs(level: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for a in 0..level {
        for b in 0..level {
            if pair_gcd(a, b, level) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

fn coprime_single(a: u32, n: u32) -> bool {
    let a = if a.is_multiple_of(n) { n } else { a % n };
    arith::gcd_u64(a as u64, n as u64) == 1
}

/// Ordered generator list for the weight-k space at one level: double
/// symbols Z[a,b;r,s] with r+s = k, r,s >= 1, then single symbols Z[a;k].
/// The pure variant keeps only residue pairs with gcd(a, b, N) = 1 and
/// singles with gcd(a, N) = 1 (zero residues read as N in both tests).
#[derive(Clone, Debug)]
pub struct DzBasis {
    level: u32,
    weight: u32,
    pure: bool,
    doubles: Vec<(u32, u32, u32)>,
    singles: Vec<u32>,
    double_index: HashMap<(u32, u32, u32), usize>,
    single_index: HashMap<u32, usize>,
}

impl DzBasis {
    pub fn new(level: u32, weight: u32, pure: bool) -> Result<Self> {
        if weight < 2 {
            return Err(Error::BadOrder(weight));
        }
        let n = level;
        let mut doubles = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if pure && pair_gcd(a, b, n) != 1 {
                    continue;
                }
                for r in 1..weight {
                    doubles.push((a, b, r));
                }
            }
        }
        let mut singles = Vec::new();
        for a in 0..n {
            if pure && !coprime_single(a, n) {
                continue;
            }
            singles.push(a);
        }
        let double_index = doubles.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        let single_index = singles
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, doubles.len() + i))
            .collect();
        Ok(DzBasis {
            level,
            weight,
            pure,
            doubles,
            singles,
            double_index,
            single_index,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn pure(&self) -> bool {
        self.pure
    }

    pub fn len(&self) -> usize {
        self.doubles.len() + self.singles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_doubles(&self) -> usize {
        self.doubles.len()
    }

    pub fn num_singles(&self) -> usize {
        self.singles.len()
    }

    pub fn double_index(&self, a: u32, b: u32, r: u32) -> Option<usize> {
        self.double_index
            .get(&(a % self.level, b % self.level, r))
            .copied()
    }

    pub fn single_index(&self, a: u32) -> Option<usize> {
        self.single_index.get(&(a % self.level)).copied()
    }

    pub fn label(&self, idx: usize) -> String {
        if idx < self.doubles.len() {
            let (a, b, r) = self.doubles[idx];
            format!("Z[{},{};{},{}]", a, b, r, self.weight - r)
        } else {
            let a = self.singles[idx - self.doubles.len()];
            format!("Z[{};{}]", a, self.weight)
        }
    }
}

/// The defining relation instance for (a, b, r, s): coefficient vector of
/// Z[a,b;r,s] + Z[b,a;s,r] + delta_{a,b} Z[a;k] minus
/// sum_{i+j=k} ( C(i-1,r-1) Z[a+b,b;i,j] + C(i-1,s-1) Z[a+b,a;i,j] ).
///
/// Invariant under (a,b;r,s) <-> (b,a;s,r).
pub fn relation_row(basis: &DzBasis, a: u32, b: u32, r: u32) -> Vec<Rat> {
    let n = basis.level;
    let k = basis.weight;
    let (a, b) = (a % n, b % n);
    let s = k - r;
    let mut row = vec![Rat::zero(); basis.len()];
    let mut bump = |idx: Option<usize>, c: Rat| {
        let idx = idx.expect("relation touches a generator outside the basis");
        row[idx] += c;
    };
    bump(basis.double_index(a, b, r), Rat::from_integer(1.into()));
    bump(basis.double_index(b, a, s), Rat::from_integer(1.into()));
    if a == b {
        bump(basis.single_index(a), Rat::from_integer(1.into()));
    }
    let ab = (a + b) % n;
    for i in 1..k {
        let cr = arith::binom(i as i64 - 1, r as i64 - 1);
        if !cr.is_zero() {
            bump(basis.double_index(ab, b, i), -Rat::from_integer(cr));
        }
        let cs = arith::binom(i as i64 - 1, s as i64 - 1);
        if !cs.is_zero() {
            bump(basis.double_index(ab, a, i), -Rat::from_integer(cs));
        }
    }
    row
}

/// All defining relation rows for one basis. Row enumeration follows the
/// counting conventions of the source material: without the purity
/// restriction, ordered pairs (a,b) with r <= s; with it, unordered residue
/// pairs {a,b} with the full range 1 <= r < k. Either enumeration covers
/// every relation instance up to the (a,b;r,s) <-> (b,a;s,r) symmetry, at
/// the price of a few duplicate rows (which cannot change the rank).
pub struct RelationMatrix {
    pub basis: DzBasis,
    pub rows: Vec<Vec<Rat>>,
    pub row_tags: Vec<(u32, u32, u32)>,
}

pub fn build_relations(level: u32, weight: u32, pure: bool) -> Result<RelationMatrix> {
    let basis = DzBasis::new(level, weight, pure)?;
    let n = level;
    let k = weight;
    let mut tags = Vec::new();
    if pure {
        for (a, b) in coprime_pairs(n) {
            if a > b {
                continue;
            }
            for r in 1..k {
                tags.push((a, b, r));
            }
        }
    } else {
        for a in 0..n {
            for b in 0..n {
                for r in 1..=(k / 2) {
                    tags.push((a, b, r));
                }
            }
        }
    }
    let rows: Vec<Vec<Rat>> = tags
        .par_iter()
        .map(|&(a, b, r)| relation_row(&basis, a, b, r))
        .collect();
    Ok(RelationMatrix {
        basis,
        rows,
        row_tags: tags,
    })
}

impl RelationMatrix {
    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.basis.len());
        for row in &self.rows {
            ech.insert(row.clone());
        }
        ech.rank()
    }

    /// Rank of the rows with single-symbol columns deleted, i.e. of the
    /// induced relations in the quotient by the span of the singles.
    pub fn doubles_rank(&self) -> usize {
        let nd = self.basis.num_doubles();
        let mut ech = Echelon::new(nd);
        for row in &self.rows {
            ech.insert(row[..nd].to_vec());
        }
        ech.rank()
    }
}

/// Exact dimension data for one space, under the literal generator counting
/// (doubles plus singles) and for the quotient by the singles.
#[derive(Clone, Debug)]
pub struct DimReport {
    pub level: u32,
    pub weight: u32,
    pub pure: bool,
    pub generators: usize,
    pub relation_rows: usize,
    pub distinct_rows: usize,
    pub rank: usize,
    pub dim: usize,
    pub doubles_generators: usize,
    pub doubles_rank: usize,
    pub doubles_dim: usize,
    /// (k-2)N^2/2 + N without purity, (k-1)(|pairs|-phi)/2 + phi with it;
    /// stated for even weight only.
    pub printed_bound: Option<i64>,
    pub note: Option<String>,
}

pub fn dz_dim(level: u32, weight: u32, pure: bool) -> Result<DimReport> {
    let mat = build_relations(level, weight, pure)?;
    let rank = mat.rank();
    let doubles_rank = mat.doubles_rank();

    let mut ech = Echelon::new(mat.basis.len());
    let mut distinct = 0usize;
    let mut seen: Vec<&Vec<Rat>> = Vec::new();
    for row in &mat.rows {
        if !seen.contains(&row) {
            seen.push(row);
            distinct += 1;
        }
        ech.insert(row.clone());
    }

    let generators = mat.basis.len();
    let doubles_generators = mat.basis.num_doubles();
    let printed_bound = if weight.is_multiple_of(2) {
        Some(if pure {
            let omega = coprime_pairs(level).len() as i64;
            let phi = arith::euler_phi(level as u64) as i64;
            (weight as i64 - 1) * (omega - phi) / 2 + phi
        } else {
            let n = level as i64;
            ((weight as i64 - 2) * n * n + 2 * n) / 2
        })
    } else {
        None
    };
    let dim = generators - rank;
    let doubles_dim = doubles_generators - doubles_rank;
    let note = if pure && distinct < mat.rows.len() {
        Some(format!(
            "{} emitted rows contain {} duplicates from the diagonal symmetry; \
             the printed dimension claim for this space matches the quotient by \
             the {} single symbols ({} generators, {} distinct relations, \
             dimension {}), while the full generator list gives dimension {}",
            mat.rows.len(),
            mat.rows.len() - distinct,
            mat.basis.num_singles(),
            doubles_generators,
            distinct,
            doubles_dim,
            dim,
        ))
    } else {
        None
    };
    Ok(DimReport {
        level,
        weight,
        pure,
        generators,
        relation_rows: mat.rows.len(),
        distinct_rows: distinct,
        rank,
        dim,
        doubles_generators,
        doubles_rank,
        doubles_dim,
        printed_bound,
        note,
    })
}

/// The two even-weight sum-formula vectors for residue a, as coefficient
/// vectors of (left side) - (right side) over the non-pure basis:
/// odd-entry sum  = (2 Z[0,a;1,k-1] + 2 Z[2a,a;1,k-1] - Z[a;k]
///                   + 2 delta_{a,0} Z[0;k]) / 4,
/// even-entry sum = (2 Z[0,a;1,k-1] - 2 Z[2a,a;1,k-1] + Z[a;k]
///                   + 2 delta_{a,0} Z[0;k]) / 4.
pub fn sum_formula_vectors(basis: &DzBasis, a: u32) -> (Vec<Rat>, Vec<Rat>) {
    let n = basis.level;
    let k = basis.weight;
    let a = a % n;
    let quarter = arith::rat(1, 4);
    let mut odd = vec![Rat::zero(); basis.len()];
    let mut even = vec![Rat::zero(); basis.len()];
    for r in 1..k {
        let idx = basis.double_index(a, a, r).unwrap();
        if r % 2 == 1 {
            odd[idx] += Rat::from_integer(1.into());
        } else {
            even[idx] += Rat::from_integer(1.into());
        }
    }
    let two_q = &quarter * Rat::from_integer(2.into());
    let i1 = basis.double_index(0, a, 1).unwrap();
    odd[i1] -= &two_q;
    even[i1] -= &two_q;
    let i2 = basis.double_index(2 * a, a, 1).unwrap();
    odd[i2] -= &two_q;
    even[i2] += &two_q;
    let is = basis.single_index(a).unwrap();
    odd[is] += &quarter;
    even[is] -= &quarter;
    if a == 0 {
        let i0 = basis.single_index(0).unwrap();
        odd[i0] -= &two_q;
        even[i0] -= &two_q;
    }
    (odd, even)
}

/// Membership outcome for the two sum formulas at one residue.
#[derive(Clone, Debug)]
pub struct SumFormulaReport {
    pub level: u32,
    pub weight: u32,
    pub residue: u32,
    pub odd_pass: bool,
    pub even_pass: bool,
    /// combination of relation-row tags realizing the odd formula
    pub odd_witness: Vec<((u32, u32, u32), Rat)>,
    pub even_witness: Vec<((u32, u32, u32), Rat)>,
}

impl SumFormulaReport {
    pub fn pass(&self) -> bool {
        self.odd_pass && self.even_pass
    }
}

/// Checks that both sum-formula vectors lie in the exact row space of the
/// defining relations (no purity restriction), returning the realizing
/// combinations.
pub fn verify_sum_formula(level: u32, weight: u32, residue: u32) -> Result<SumFormulaReport> {
    if weight < 2 || !weight.is_multiple_of(2) {
        return Err(Error::BadOrder(weight));
    }
    let mat = build_relations(level, weight, false)?;
    let mut ech = Echelon::new(mat.basis.len());
    let mut inserted_tags = Vec::new();
    for (row, tag) in mat.rows.iter().zip(&mat.row_tags) {
        ech.insert(row.clone());
        inserted_tags.push(*tag);
    }
    let (odd_vec, even_vec) = sum_formula_vectors(&mat.basis, residue);
    let reduce = |v: &[Rat]| {
        let (residue_vec, combo) = ech.reduce_with_witness(v);
        let pass = residue_vec.iter().all(|c| c.is_zero());
        let witness: Vec<((u32, u32, u32), Rat)> = combo
            .into_iter()
            .map(|(i, c)| (inserted_tags[i], c))
            .collect();
        (pass, witness)
    };
    let (odd_pass, odd_witness) = reduce(&odd_vec);
    let (even_pass, even_witness) = reduce(&even_vec);
    Ok(SumFormulaReport {
        level,
        weight,
        residue,
        odd_pass,
        even_pass,
        odd_witness,
        even_witness,
    })
}

// ---------------------------------------------------------------------------
// Relations from homogeneous polynomials
// ---------------------------------------------------------------------------

/// Bivariate polynomial as (x-degree, y-degree) -> coefficient.
pub type BivarPoly = BTreeMap<(u32, u32), Rat>;

fn check_homogeneous(poly: &BivarPoly, degree: u32, tag: &str) -> Result<()> {
    for (&(dx, dy), c) in poly {
        if !c.is_zero() && dx + dy != degree {
            return Err(Error::BadPolynomial(format!(
                "{}: monomial X^{} Y^{} is not of degree {}",
                tag, dx, dy, degree
            )));
        }
    }
    Ok(())
}

/// Relation coefficients c^{a,b}_{i,j}, keyed (a, b, i) with j = k - i.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationCoeffs {
    pub coeffs: BTreeMap<(u32, u32, u32), Rat>,
}

impl RelationCoeffs {
    fn add(&mut self, key: (u32, u32, u32), c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn to_doubles_vector(&self, basis: &DzBasis) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); basis.num_doubles()];
        for (&(a, b, i), c) in &self.coeffs {
            v[basis.double_index(a, b, i).unwrap()] = c.clone();
        }
        v
    }
}

/// Outcome of expanding a polynomial family into a relation and certifying
/// membership modulo the singles.
#[derive(Clone, Debug)]
pub struct PolyRelation {
    pub level: u32,
    pub weight: u32,
    pub coeffs: RelationCoeffs,
    pub member: bool,
    /// combination of defining-relation tags realizing the coefficients
    /// modulo single symbols
    pub certificate: Vec<((u32, u32, u32), Rat)>,
}

/// Expands sum_{a<=b} of the four-term combination F_{a,b}(X_b, Y_a) +
/// F_{a,b}(Y_b, X_a) - F_{a,b}(X_{a+b}+Y_b, X_{a+b}) - F_{a,b}(X_{a+b},
/// X_{a+b}+Y_a) and reads
/// the coefficients off against the weighted basis C(k-2,i-1) X_a^{i-1}
/// Y_b^{j-1}. Boundary monomials with a bare variable keep the residue tags
/// of the term that produced them, so every contribution lands on a definite
/// (a, b) pair. The induced combination of double symbols is then certified
/// to vanish modulo singles, i.e. to lie in the projected row space of the
/// defining relations.
pub fn polynomial_to_relation(
    level: u32,
    weight: u32,
    family: &BTreeMap<(u32, u32), BivarPoly>,
) -> Result<PolyRelation> {
    if weight < 2 {
        return Err(Error::BadOrder(weight));
    }
    let n = level;
    let k = weight;
    let mut coeffs = RelationCoeffs::default();
    for (&(a, b), poly) in family {
        if a >= n || b >= n || a > b {
            return Err(Error::BadPolynomial(format!(
                "family key ({},{}) is not an ordered residue pair below {}",
                a, b, n
            )));
        }
        check_homogeneous(poly, k - 2, &format!("F[{},{}]", a, b))?;
        let ab = (a + b) % n;
        for (&(dx, dy), c) in poly {
            if c.is_zero() {
                continue;
            }
            // F(X_b, Y_a): X_b^dx Y_a^dy
            coeffs.add((b, a, dx + 1), c / binom_rat(k as i64 - 2, dx as i64));
            // F(Y_b, X_a): X_a^dy Y_b^dx
            coeffs.add((a, b, dy + 1), c / binom_rat(k as i64 - 2, dy as i64));
            // -F(X_{a+b}+Y_b, X_{a+b}): X_{a+b}^{dx-t+dy} Y_b^t
            for t in 0..=dx {
                let w = c * binom_rat(dx as i64, t as i64)
                    / binom_rat(k as i64 - 2, (dx - t + dy) as i64);
                coeffs.add((ab, b, dx - t + dy + 1), -w);
            }
            // -F(X_{a+b}, X_{a+b}+Y_a): X_{a+b}^{dx+dy-t} Y_a^t
            for t in 0..=dy {
                let w = c * binom_rat(dy as i64, t as i64)
                    / binom_rat(k as i64 - 2, (dx + dy - t) as i64);
                coeffs.add((ab, a, dx + dy - t + 1), -w);
            }
        }
    }

    let mat = build_relations(n, k, false)?;
    let nd = mat.basis.num_doubles();
    let mut ech = Echelon::new(nd);
    let mut inserted_tags = Vec::new();
    for (row, tag) in mat.rows.iter().zip(&mat.row_tags) {
        ech.insert(row[..nd].to_vec());
        inserted_tags.push(*tag);
    }
    let target = coeffs.to_doubles_vector(&mat.basis);
    let (residue, combo) = ech.reduce_with_witness(&target);
    let member = residue.iter().all(|c| c.is_zero());
    let certificate = combo
        .into_iter()
        .map(|(i, c)| (inserted_tags[i], c))
        .collect();
    Ok(PolyRelation {
        level,
        weight,
        coeffs,
        member,
        certificate,
    })
}

/// Best-effort inverse: given relation coefficients that vanish modulo
/// singles, produce one polynomial family realizing them. Returns None when
/// the coefficients are not in the projected row space. The family is far
/// from unique; this picks the combination found by elimination and maps
/// each defining-relation instance (a, b, r, s) to the single monomial
/// C(k-2, .) X^. Y^. on the unordered pair {a, b}.
pub fn relation_to_polynomial(
    level: u32,
    weight: u32,
    coeffs: &RelationCoeffs,
) -> Result<Option<BTreeMap<(u32, u32), BivarPoly>>> {
    if weight < 2 {
        return Err(Error::BadOrder(weight));
    }
    let k = weight;
    let mat = build_relations(level, k, false)?;
    let nd = mat.basis.num_doubles();
    let mut ech = Echelon::new(nd);
    let mut inserted_tags = Vec::new();
    for (row, tag) in mat.rows.iter().zip(&mat.row_tags) {
        ech.insert(row[..nd].to_vec());
        inserted_tags.push(*tag);
    }
    let target = coeffs.to_doubles_vector(&mat.basis);
    let (residue, combo) = ech.reduce_with_witness(&target);
    if residue.iter().any(|c| !c.is_zero()) {
        return Ok(None);
    }
    let mut family: BTreeMap<(u32, u32), BivarPoly> = BTreeMap::new();
    for (i, w) in combo {
        let (a, b, r) = inserted_tags[i];
        let s = k - r;
        // instance (a,b,r,s) arises from the monomial on the ordered key
        // (min, max): orientation (b', a') = (a, b) needs b' <= a'
        let (key, xdeg) = if b <= a { ((b, a), r) } else { ((a, b), s) };
        let poly = family.entry(key).or_default();
        let mon = (xdeg - 1, k - xdeg - 1);
        let c = w * binom_rat(k as i64 - 2, xdeg as i64 - 1);
        let entry = poly.entry(mon).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            poly.remove(&mon);
        }
    }
    family.retain(|_, p| !p.is_empty());
    Ok(Some(family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn basis_counts() {
        for n in 1..=4u32 {
            for k in 2..=6u32 {
                let basis = DzBasis::new(n, k, false).unwrap();
                assert_eq!(basis.num_doubles() as u32, (k - 1) * n * n);
                assert_eq!(basis.num_singles() as u32, n);
                let pure = DzBasis::new(n, k, true).unwrap();
                let omega = coprime_pairs(n).len() as u32;
                assert_eq!(pure.num_doubles() as u32, (k - 1) * omega);
                assert_eq!(pure.num_singles() as u64, arith::euler_phi(n as u64));
            }
        }
        assert_eq!(coprime_pairs(1).len(), 1);
        assert_eq!(coprime_pairs(2).len(), 3);
        assert_eq!(coprime_pairs(3).len(), 8);
        assert_eq!(coprime_pairs(4).len(), 12);
        assert!(DzBasis::new(2, 1, false).is_err());
    }

    #[test]
    fn relation_counts() {
        let m = build_relations(1, 4, false).unwrap();
        assert_eq!(m.basis.len(), 4);
        assert_eq!(m.rows.len(), 2);
        for k in [4u32, 6] {
            let m = build_relations(2, k, false).unwrap();
            assert_eq!(m.rows.len() as u32, 2 * k);
        }
        let m = build_relations(3, 4, true).unwrap();
        assert_eq!(m.basis.len(), 26);
        assert_eq!(m.rows.len(), 15);
    }

    #[test]
    fn rows_invariant_under_pair_swap() {
        for (n, k) in [(2u32, 4u32), (3, 5), (4, 4)] {
            let basis = DzBasis::new(n, k, false).unwrap();
            for a in 0..n {
                for b in 0..n {
                    for r in 1..k {
                        assert_eq!(
                            relation_row(&basis, a, b, r),
                            relation_row(&basis, b, a, k - r),
                            "N={} k={} ({},{},{})",
                            n,
                            k,
                            a,
                            b,
                            r
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn level_one_weight_two() {
        let rep = dz_dim(1, 2, false).unwrap();
        assert_eq!(rep.generators, 2);
        assert_eq!(rep.relation_rows, 1);
        assert_eq!(rep.rank, 1);
        assert_eq!(rep.dim, 1);
        // the single relation forces the single symbol to vanish
        let m = build_relations(1, 2, false).unwrap();
        assert_eq!(m.rows[0][0], Rat::zero());
        assert_eq!(m.rows[0][1], Rat::from_integer(1.into()));
    }

    #[test]
    fn pure_three_four_dimension() {
        let rep = dz_dim(3, 4, true).unwrap();
        assert_eq!(rep.generators, 26);
        assert_eq!(rep.relation_rows, 15);
        assert_eq!(rep.distinct_rows, 13);
        assert_eq!(rep.rank, 13);
        assert_eq!(rep.dim, 13);
        assert_eq!(rep.doubles_generators, 24);
        assert_eq!(rep.doubles_rank, 13);
        assert_eq!(rep.doubles_dim, 11);
        assert_eq!(rep.printed_bound, Some(11));
        assert!(rep.note.is_some());
    }

    #[test]
    fn dimension_bound_sweep() {
        for n in 1..=3u32 {
            for k in (2..=10u32).step_by(2) {
                let rep = dz_dim(n, k, false).unwrap();
                assert_eq!(rep.dim, rep.generators - rep.rank);
                assert!(
                    rep.dim as i64 >= rep.printed_bound.unwrap(),
                    "N={} k={}: dim {} < bound {:?}",
                    n,
                    k,
                    rep.dim,
                    rep.printed_bound
                );
            }
        }
        let rep = dz_dim(4, 10, false).unwrap();
        assert!(rep.dim as i64 >= rep.printed_bound.unwrap());
    }

    #[test]
    fn sum_formula_memberships() {
        for k in (4..=10u32).step_by(2) {
            let rep = verify_sum_formula(1, k, 0).unwrap();
            assert!(rep.pass(), "N=1 k={}", k);
        }
        for k in (4..=8u32).step_by(2) {
            let rep = verify_sum_formula(2, k, 1).unwrap();
            assert!(rep.pass(), "N=2 k={}", k);
        }
        let rep = verify_sum_formula(4, 6, 2).unwrap();
        assert!(rep.pass());
        assert!(verify_sum_formula(2, 5, 1).is_err());
    }

    #[test]
    fn sum_formula_level_one_weight_four_vector() {
        let basis = DzBasis::new(1, 4, false).unwrap();
        let (odd, even) = sum_formula_vectors(&basis, 0);
        // odd-entry vector is Z[0,0;3,1] - Z[0;4]/4
        let mut want = vec![Rat::zero(); 4];
        want[basis.double_index(0, 0, 3).unwrap()] = Rat::from_integer(1.into());
        want[basis.single_index(0).unwrap()] = rat(-1, 4);
        assert_eq!(odd, want);
        // even-entry vector is Z[0,0;2,2] - 3 Z[0;4]/4
        let mut want = vec![Rat::zero(); 4];
        want[basis.double_index(0, 0, 2).unwrap()] = Rat::from_integer(1.into());
        want[basis.single_index(0).unwrap()] = rat(-3, 4);
        assert_eq!(even, want);
    }

    #[test]
    fn single_monomial_recovers_relation_instance() {
        for n in [1u32, 2] {
            let k = 4u32;
            let basis = DzBasis::new(n, k, false).unwrap();
            for a in 0..n {
                for b in a..n {
                    for r in 1..k {
                        let s = k - r;
                        let mut family = BTreeMap::new();
                        let mut poly = BivarPoly::new();
                        poly.insert((r - 1, s - 1), binom_rat(k as i64 - 2, r as i64 - 1));
                        family.insert((a, b), poly);
                        let rel = polynomial_to_relation(n, k, &family).unwrap();
                        assert!(rel.member, "N={} ({},{},{})", n, a, b, r);
                        // instance (b, a, r, s) projected to double symbols
                        let row = relation_row(&basis, b, a, r);
                        let got = rel.coeffs.to_doubles_vector(&basis);
                        assert_eq!(&row[..basis.num_doubles()], &got[..]);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_and_invalid_polynomials() {
        let rel = polynomial_to_relation(2, 4, &BTreeMap::new()).unwrap();
        assert!(rel.member);
        assert!(rel.coeffs.coeffs.is_empty());
        assert!(rel.certificate.is_empty());

        let mut family = BTreeMap::new();
        let mut poly = BivarPoly::new();
        poly.insert((1, 0), Rat::from_integer(1.into()));
        family.insert((0u32, 1u32), poly);
        assert!(matches!(
            polynomial_to_relation(2, 4, &family),
            Err(Error::BadPolynomial(_))
        ));
        let mut family = BTreeMap::new();
        family.insert((1u32, 0u32), BivarPoly::new());
        assert!(matches!(
            polynomial_to_relation(2, 4, &family),
            Err(Error::BadPolynomial(_))
        ));
    }

    #[test]
    fn pure_pairs_closed_under_expansion() {
        // level-2 pure pairs: expanding any monomial family supported on
        // them yields coefficients supported on pure pairs only
        let n = 2u32;
        let k = 6u32;
        for (a, b) in [(0u32, 1u32), (1, 1)] {
            for r in 1..k {
                let mut family = BTreeMap::new();
                let mut poly = BivarPoly::new();
                poly.insert((r - 1, k - r - 1), Rat::from_integer(1.into()));
                family.insert((a, b), poly);
                let rel = polynomial_to_relation(n, k, &family).unwrap();
                for &(ca, cb, _) in rel.coeffs.coeffs.keys() {
                    assert_eq!(pair_gcd(ca, cb, n), 1, "({},{})", ca, cb);
                }
            }
        }
    }

    #[test]
    fn polynomial_round_trip() {
        let n = 2u32;
        let k = 6u32;
        let basis = DzBasis::new(n, k, false).unwrap();
        // combination of two relation instances, projected mod singles
        let r1 = relation_row(&basis, 0, 1, 1);
        let r2 = relation_row(&basis, 1, 1, 2);
        let mut coeffs = RelationCoeffs::default();
        for (idx, (c1, c2)) in r1.iter().zip(&r2).enumerate().take(basis.num_doubles()) {
            let (a, b, r) = basis.doubles[idx];
            coeffs.add((a, b, r), c1 * rat(2, 1) + c2 * rat(-1, 3));
        }
        let family = relation_to_polynomial(n, k, &coeffs).unwrap().unwrap();
        let rel = polynomial_to_relation(n, k, &family).unwrap();
        assert!(rel.member);
        assert_eq!(rel.coeffs, coeffs);

        // a vector outside the projected row space has no realization
        let mut bad = RelationCoeffs::default();
        bad.add((0, 1, 1), rat(1, 1));
        assert!(relation_to_polynomial(n, k, &bad).unwrap().is_none());
    }
}

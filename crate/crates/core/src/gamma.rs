//! The weight-two correction system: the exact linear system satisfied by
//! the gamma/lambda correction terms of the double Eisenstein relations,
//! its left null space, its rank and pivot structure, concrete solutions,
//! and direct verification of assignments against the defining constraints.
//!
//! Unknowns are symbols gamma^{a,b} (all ordered pairs mod N) and
//! lambda^{a,b} (unordered pairs); every right-hand side is a rational
//! combination of the weight-two generators F_a / G_a.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::arith::{self, Rat};
use crate::cyclotomic::CycNum;
use crate::linalg::{self, RhsOps};
use crate::qseries::{divisor_identity_symbolvec, f2_series, g_series, QSeries, SymbolVec};
use crate::{Error, Result};

/// Column label: one unknown of the system.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Col {
    /// lambda^{a,b} with a <= b (stored once per unordered pair)
    Lambda(u32, u32),
    /// gamma^{a,b}, ordered pair
    Gamma(u32, u32),
}

impl fmt::Display for Col {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Col::Lambda(a, b) => write!(f, "lambda({},{})", a, b),
            Col::Gamma(a, b) => write!(f, "gamma({},{})", a, b),
        }
    }
}

/// Parses "gamma(a,b)" / "lambda(a,b)" with residues reduced mod the level;
/// lambda indices are reordered to a <= b.
pub fn parse_col_label(level: u32, s: &str) -> Result<Col> {
    let bad = || Error::Usage(format!("bad column label {:?}", s));
    let (kind, rest) = s.split_once('(').ok_or_else(bad)?;
    let inner = rest.strip_suffix(')').ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    let (a, b) = (a % level, b % level);
    match kind.trim() {
        "gamma" => Ok(Col::Gamma(a, b)),
        "lambda" => Ok(Col::Lambda(a.min(b), a.max(b))),
        _ => Err(bad()),
    }
}

/// Row label: one equation of the system.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Row {
    /// gamma^{a+b,a} + gamma^{a+b,b} - 2 lambda^{a,b} = F_a + F_b, a <= b
    Shuffle(u32, u32),
    /// gamma^{a,b} + gamma^{b,a} - gamma^{a+b,a} - gamma^{a+b,b} = -F_a - F_b, a < b
    Cross(u32, u32),
    /// gamma^{a,a} - gamma^{2a,a} = G_a - F_a, 1 <= a < N
    Diagonal(u32),
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Row::Shuffle(a, b) => write!(f, "shuffle({},{})", a, b),
            Row::Cross(a, b) => write!(f, "cross({},{})", a, b),
            Row::Diagonal(a) => write!(f, "diagonal({})", a),
        }
    }
}

/// The assembled system: matrix rows over the labeled columns, with one
/// symbol-vector right-hand side per row.
#[derive(Clone, Debug)]
pub struct LinSystem {
    pub level: u32,
    pub mat: Vec<Vec<Rat>>,
    pub rhs: Vec<SymbolVec>,
    pub rows: Vec<Row>,
    pub cols: Vec<Col>,
    col_index: HashMap<Col, usize>,
}

/// Column order: lambda (a <= b, lex), gamma upper (a < b, lex), gamma
/// diagonal (a ascending), gamma lower (a > b, lex). The pivot structure
/// published by [`rank_and_pivots`] is stated relative to this order.
pub fn col_labels(level: u32) -> Vec<Col> {
    let n = level;
    let mut cols = Vec::new();
    for a in 0..n {
        for b in a..n {
            cols.push(Col::Lambda(a, b));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            cols.push(Col::Gamma(a, b));
        }
    }
    for a in 0..n {
        cols.push(Col::Gamma(a, a));
    }
    for a in 0..n {
        for b in 0..a {
            cols.push(Col::Gamma(a, b));
        }
    }
    cols
}

/// Row order: shuffle (a <= b, lex), cross (a < b, lex), diagonal
/// (a = 1..N-1).
pub fn row_labels(level: u32) -> Vec<Row> {
    let n = level;
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a..n {
            rows.push(Row::Shuffle(a, b));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            rows.push(Row::Cross(a, b));
        }
    }
    for a in 1..n {
        rows.push(Row::Diagonal(a));
    }
    rows
}

/// Builds the full system at a given level: (N^2+N-1) equations in
/// (3N^2+N)/2 unknowns, every entry in {-2,...,2}.
pub fn build_system(level: u32) -> Result<LinSystem> {
    if level < 1 {
        return Err(Error::BadLevel { min: 1, got: level });
    }
    let n = level;
    let cols = col_labels(n);
    let col_index: HashMap<Col, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let rows = row_labels(n);
    let mut mat = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    for &row in &rows {
        let mut v = vec![Rat::zero(); cols.len()];
        let mut add = |col: Col, c: i64| {
            v[col_index[&col]] += arith::rat_int(c);
        };
        let mut b = SymbolVec::zero(n);
        match row {
            Row::Shuffle(x, y) => {
                let s = (x + y) % n;
                add(Col::Gamma(s, x), 1);
                add(Col::Gamma(s, y), 1);
                add(Col::Lambda(x, y), -2);
                b.add_f(x, &arith::rat_int(1));
                b.add_f(y, &arith::rat_int(1));
            }
            Row::Cross(x, y) => {
                let s = (x + y) % n;
                add(Col::Gamma(x, y), 1);
                add(Col::Gamma(y, x), 1);
                add(Col::Gamma(s, x), -1);
                add(Col::Gamma(s, y), -1);
                b.add_f(x, &arith::rat_int(-1));
                b.add_f(y, &arith::rat_int(-1));
            }
            Row::Diagonal(x) => {
                add(Col::Gamma(x, x), 1);
                add(Col::Gamma((2 * x) % n, x), -1);
                b.add_g(x, &arith::rat_int(1));
                b.add_f(x, &arith::rat_int(-1));
            }
        }
        mat.push(v);
        rhs.push(b);
    }
    Ok(LinSystem {
        level: n,
        mat,
        rhs,
        rows,
        cols,
        col_index,
    })
}

impl LinSystem {
    pub fn col_index(&self, col: Col) -> usize {
        self.col_index[&col]
    }
}

/// The 0/1 left-null row vector attached to a proper divisor d of the
/// level: ones on the cross rows with gcd(a,b,N) = d and the diagonal rows
/// with gcd(a,N) = d.
pub fn null_vector(level: u32, d: u32) -> Result<Vec<Rat>> {
    if d == 0 || d >= level || !level.is_multiple_of(d) {
        return Err(Error::NotProperDivisor(d as u64));
    }
    let n = level as u64;
    let rows = row_labels(level);
    let v = rows
        .iter()
        .map(|row| {
            let hit = match *row {
                Row::Shuffle(..) => false,
                Row::Cross(a, b) => {
                    arith::gcd_u64(arith::gcd_u64(a as u64, b as u64), n) == d as u64
                }
                Row::Diagonal(a) => arith::gcd_u64(a as u64, n) == d as u64,
            };
            if hit {
                arith::rat_int(1)
            } else {
                Rat::zero()
            }
        })
        .collect();
    Ok(v)
}

/// Per-divisor outcome inside a [`NullSpaceReport`].
#[derive(Clone, Debug)]
pub struct DivisorNullCheck {
    pub d: u32,
    /// vector . matrix = 0 exactly
    pub annihilates: bool,
    /// vector . rhs vanishes as a q-series through the truncation
    pub series_vanishes: bool,
    /// vector . rhs equals the divisor-identity symbol of level N/d lifted
    /// back to level N, exactly
    pub symbol_matches_lift: bool,
}

/// Outcome of the full null-space verification.
#[derive(Clone, Debug)]
pub struct NullSpaceReport {
    pub level: u32,
    pub truncation: usize,
    pub kernel_dim: usize,
    pub expected_dim: usize,
    /// the per-divisor vectors are linearly independent (they span the
    /// kernel when kernel_dim matches)
    pub vectors_independent: bool,
    pub per_divisor: Vec<DivisorNullCheck>,
}

impl NullSpaceReport {
    pub fn pass(&self) -> bool {
        self.kernel_dim == self.expected_dim
            && self.vectors_independent
            && self
                .per_divisor
                .iter()
                .all(|c| c.annihilates && c.series_vanishes && c.symbol_matches_lift)
    }
}

fn pair_symbol(sys: &LinSystem, vector: &[Rat]) -> SymbolVec {
    let mut acc = SymbolVec::zero(sys.level);
    for (c, b) in vector.iter().zip(&sys.rhs) {
        if !c.is_zero() {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

/// Verifies the left null space: each divisor vector annihilates the matrix
/// exactly, the computed kernel dimension equals (number of divisors of N)
/// minus one, and each pairing with the right-hand side vanishes both as a
/// truncated series and symbolically via the lifted divisor identity.
pub fn verify_null_space(level: u32, truncation: usize) -> Result<NullSpaceReport> {
    let sys = build_system(level)?;
    let kernel = linalg::left_kernel(&sys.mat);
    let expected_dim = arith::divisor_count(level as u64) as usize - 1;

    let divisors: Vec<u32> = arith::divisors(level as u64)
        .into_iter()
        .filter(|&d| d < level as u64)
        .map(|d| d as u32)
        .collect();
    let mut ech = linalg::Echelon::new(sys.rows.len());
    let mut per_divisor = Vec::new();
    let mut all_independent = true;
    for &d in &divisors {
        let v = null_vector(level, d)?;
        all_independent &= ech.insert(v.clone());
        let annihilates = (0..sys.cols.len()).all(|j| {
            let dot: Rat = v.iter().zip(&sys.mat).map(|(c, row)| c * &row[j]).sum();
            dot.is_zero()
        });
        let paired = pair_symbol(&sys, &v);
        let series_vanishes = paired.to_series(truncation).is_zero();
        let lifted = divisor_identity_symbolvec(level / d)?.lift(d);
        let symbol_matches_lift = paired == lifted;
        per_divisor.push(DivisorNullCheck {
            d,
            annihilates,
            series_vanishes,
            symbol_matches_lift,
        });
    }
    Ok(NullSpaceReport {
        level,
        truncation,
        kernel_dim: kernel.len(),
        expected_dim,
        vectors_independent: all_independent,
        per_divisor,
    })
}

/// Rank and pivot outcome.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub level: u32,
    pub rank: usize,
    pub expected_rank: usize,
    pub pivot_cols: Vec<Col>,
    pub expected_pivot_cols: Vec<Col>,
}

impl RankReport {
    pub fn pass(&self) -> bool {
        self.rank == self.expected_rank && self.pivot_cols == self.expected_pivot_cols
    }
}

/// Expected pivots under the documented column order: every lambda, every
/// upper gamma, and the diagonal gamma^{a,a} for which N-a does NOT divide N
/// (a = 0 counts as N-a = N, hence free). Lower gammas are always free.
pub fn expected_pivots(level: u32) -> Vec<Col> {
    let n = level;
    col_labels(n)
        .into_iter()
        .filter(|col| match *col {
            Col::Lambda(..) => true,
            Col::Gamma(a, b) if a < b => true,
            Col::Gamma(a, b) if a == b => !n.is_multiple_of(n - a),
            _ => false,
        })
        .collect()
}

/// Eliminates the matrix and checks rank = N^2 + N - (number of divisors)
/// and the exact pivot column set.
pub fn rank_and_pivots(level: u32) -> Result<RankReport> {
    let sys = build_system(level)?;
    let nrows = sys.mat.len();
    let red = linalg::rref(sys.mat.clone(), vec![(); nrows]);
    let pivot_cols: Vec<Col> = red.pivots.iter().map(|&i| sys.cols[i]).collect();
    let n = level as u64;
    let expected_rank = (n * n + n - arith::divisor_count(n)) as usize;
    Ok(RankReport {
        level,
        rank: red.rank,
        expected_rank,
        pivot_cols,
        expected_pivot_cols: expected_pivots(level),
    })
}

/// A concrete gamma/lambda assignment: one symbol vector per gamma^{a,b}
/// (ordered pairs) and per lambda^{a,b} (unordered pairs), plus optional
/// single-coefficient series perturbations used by negative controls.
#[derive(Clone, Debug)]
pub struct GammaLambdaAssignment {
    level: u32,
    gamma: BTreeMap<(u32, u32), SymbolVec>,
    lambda: BTreeMap<(u32, u32), SymbolVec>,
    gamma_bumps: BTreeMap<(u32, u32), Vec<(usize, CycNum)>>,
    lambda_bumps: BTreeMap<(u32, u32), Vec<(usize, CycNum)>>,
}

impl GammaLambdaAssignment {
    pub fn zero(level: u32) -> Self {
        let mut gamma = BTreeMap::new();
        let mut lambda = BTreeMap::new();
        for a in 0..level {
            for b in 0..level {
                gamma.insert((a, b), SymbolVec::zero(level));
                if a <= b {
                    lambda.insert((a, b), SymbolVec::zero(level));
                }
            }
        }
        GammaLambdaAssignment {
            level,
            gamma,
            lambda,
            gamma_bumps: BTreeMap::new(),
            lambda_bumps: BTreeMap::new(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn set_gamma(&mut self, a: u32, b: u32, v: SymbolVec) {
        assert_eq!(v.level(), self.level);
        self.gamma.insert((a % self.level, b % self.level), v);
    }

    pub fn set_lambda(&mut self, a: u32, b: u32, v: SymbolVec) {
        assert_eq!(v.level(), self.level);
        let (a, b) = (a % self.level, b % self.level);
        self.lambda.insert((a.min(b), a.max(b)), v);
    }

    pub fn gamma(&self, a: u32, b: u32) -> &SymbolVec {
        &self.gamma[&(a % self.level, b % self.level)]
    }

    pub fn lambda(&self, a: u32, b: u32) -> &SymbolVec {
        let (a, b) = (a % self.level, b % self.level);
        &self.lambda[&(a.min(b), a.max(b))]
    }

    /// Adds coeff * q^power to the evaluated gamma^{a,b} series only.
    pub fn perturb_gamma(&mut self, a: u32, b: u32, power: usize, coeff: CycNum) {
        assert_eq!(coeff.level(), self.level);
        self.gamma_bumps
            .entry((a % self.level, b % self.level))
            .or_default()
            .push((power, coeff));
    }

    /// Adds coeff * q^power to the evaluated lambda^{a,b} series only.
    pub fn perturb_lambda(&mut self, a: u32, b: u32, power: usize, coeff: CycNum) {
        assert_eq!(coeff.level(), self.level);
        let (a, b) = (a % self.level, b % self.level);
        self.lambda_bumps
            .entry((a.min(b), a.max(b)))
            .or_default()
            .push((power, coeff));
    }

    fn bumped(&self, base: QSeries, bumps: Option<&Vec<(usize, CycNum)>>) -> QSeries {
        let mut s = base;
        if let Some(bumps) = bumps {
            for (power, coeff) in bumps {
                s.add_to_coeff(*power, coeff);
            }
        }
        s
    }

    pub fn gamma_series(&self, a: u32, b: u32, truncation: usize) -> QSeries {
        let key = (a % self.level, b % self.level);
        self.bumped(
            self.gamma[&key].to_series(truncation),
            self.gamma_bumps.get(&key),
        )
    }

    pub fn lambda_series(&self, a: u32, b: u32, truncation: usize) -> QSeries {
        let (a, b) = (a % self.level, b % self.level);
        let key = (a.min(b), a.max(b));
        self.bumped(
            self.lambda[&key].to_series(truncation),
            self.lambda_bumps.get(&key),
        )
    }

    /// The explicit hand-picked assignment at small levels (1, 2, 3).
    pub fn explicit(level: u32) -> Result<Self> {
        let mut asg = Self::zero(level);
        let f = |a: u32| SymbolVec::f_unit(level, a);
        let g = |a: u32| SymbolVec::g_unit(level, a);
        match level {
            1 => {
                // gamma = F_0, lambda = 0 satisfies gamma - lambda = F_0
                asg.set_gamma(0, 0, f(0));
            }
            2 => {
                asg.set_gamma(0, 0, f(0));
                asg.set_gamma(1, 1, g(1).sub(&f(1)));
                asg.set_lambda(1, 1, f(1).neg());
            }
            3 => {
                asg.set_gamma(0, 0, f(0));
                for a in 1..3 {
                    // diagonal G_a - F_a; edge to zero F_0 + 2F_a - G_a
                    let diag = g(a).sub(&f(a));
                    let edge = f(0).add(&f(a).scale(&arith::rat_int(2))).sub(&g(a));
                    asg.set_gamma(a, a, diag);
                    asg.set_gamma(a, 0, edge.clone());
                    asg.set_gamma(0, a, edge.neg());
                    asg.set_lambda(a, a, f(a).neg());
                }
            }
            _ => {
                return Err(Error::UnknownAssignment(format!(
                    "no explicit assignment at level {}",
                    level
                )))
            }
        }
        Ok(asg)
    }

    pub fn to_json(&self) -> Value {
        let fmt_map = |m: &BTreeMap<(u32, u32), SymbolVec>| -> Value {
            Value::Object(
                m.iter()
                    .map(|((a, b), v)| (format!("{},{}", a, b), v.to_json()))
                    .collect(),
            )
        };
        json!({
            "level": self.level,
            "gamma": fmt_map(&self.gamma),
            "lambda": fmt_map(&self.lambda),
        })
    }
}

/// One verified constraint equation.
#[derive(Clone, Debug)]
pub struct EquationCheck {
    pub label: String,
    /// First power where the two sides differ, within the truncation.
    pub first_bad_power: Option<usize>,
}

/// Outcome of checking an assignment against the defining constraints.
#[derive(Clone, Debug)]
pub struct AssignmentCheck {
    pub level: u32,
    pub truncation: usize,
    pub equations: Vec<EquationCheck>,
}

impl AssignmentCheck {
    pub fn pass(&self) -> bool {
        self.equations.iter().all(|e| e.first_bad_power.is_none())
    }

    pub fn failing_labels(&self) -> Vec<&str> {
        self.equations
            .iter()
            .filter(|e| e.first_bad_power.is_some())
            .map(|e| e.label.as_str())
            .collect()
    }
}

/// Substitutes the assignment into the defining constraints and compares
/// both sides as q-series through the truncation:
/// stuffle diagonal gamma^{a,a} - lambda^{a,a} = G_a (G_0 meaning F_0),
/// stuffle off-diagonal gamma^{a,b} + gamma^{b,a} - 2 lambda^{a,b} = 0,
/// shuffle gamma^{a+b,a} + gamma^{a+b,b} - 2 lambda^{a,b} = F_a + F_b.
pub fn check_assignment(
    level: u32,
    assignment: &GammaLambdaAssignment,
    truncation: usize,
) -> Result<AssignmentCheck> {
    assert_eq!(assignment.level(), level, "assignment level mismatch");
    let n = level;
    let m = truncation;
    let mut equations = Vec::new();
    for a in 0..n {
        let lhs = assignment
            .gamma_series(a, a, m)
            .sub(&assignment.lambda_series(a, a, m));
        let rhs = if a == 0 {
            f2_series(n, 0, m)
        } else {
            g_series(n, &[a], &[2], m)?
        };
        equations.push(EquationCheck {
            label: format!("stuffle({},{})", a, a),
            first_bad_power: lhs.first_difference(&rhs),
        });
    }
    for a in 0..n {
        for b in a + 1..n {
            let lhs = assignment
                .gamma_series(a, b, m)
                .add(&assignment.gamma_series(b, a, m))
                .sub(
                    &assignment
                        .lambda_series(a, b, m)
                        .scale_rat(&arith::rat_int(2)),
                );
            let rhs = QSeries::zero(n, m);
            equations.push(EquationCheck {
                label: format!("stuffle({},{})", a, b),
                first_bad_power: lhs.first_difference(&rhs),
            });
        }
    }
    for a in 0..n {
        for b in a..n {
            let s = (a + b) % n;
            let lhs = assignment
                .gamma_series(s, a, m)
                .add(&assignment.gamma_series(s, b, m))
                .sub(
                    &assignment
                        .lambda_series(a, b, m)
                        .scale_rat(&arith::rat_int(2)),
                );
            let rhs = f2_series(n, a, m).add(&f2_series(n, b, m));
            equations.push(EquationCheck {
                label: format!("shuffle({},{})", a, b),
                first_bad_power: lhs.first_difference(&rhs),
            });
        }
    }
    Ok(AssignmentCheck {
        level,
        truncation,
        equations,
    })
}

/// Output of [`solve`].
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub level: u32,
    pub truncation: usize,
    pub assignment: GammaLambdaAssignment,
    pub pivot_cols: Vec<Col>,
    pub free_cols: Vec<Col>,
    /// Right-hand sides left on rows whose matrix part eliminated to zero;
    /// each must vanish as a series for the system to be consistent.
    pub residuals: Vec<SymbolVec>,
    pub residuals_vanish: bool,
    pub check: AssignmentCheck,
}

impl SolveResult {
    pub fn pass(&self) -> bool {
        self.residuals_vanish && self.check.pass()
    }
}

/// Solves the system with the given symbol values on free columns (missing
/// entries default to zero), back-substituting through the exact reduced
/// echelon form. Supplying a value for a pivot column is an error.
pub fn solve(
    level: u32,
    free_values: &HashMap<Col, SymbolVec>,
    truncation: usize,
) -> Result<SolveResult> {
    let sys = build_system(level)?;
    let red = linalg::rref(sys.mat.clone(), sys.rhs.clone());
    let pivot_cols: Vec<Col> = red.pivots.iter().map(|&i| sys.cols[i]).collect();
    let free_idx: Vec<usize> = red.free_cols();
    let free_cols: Vec<Col> = free_idx.iter().map(|&i| sys.cols[i]).collect();
    for col in free_values.keys() {
        if !free_cols.contains(col) {
            return Err(Error::FreeValueOnPivot(col.to_string()));
        }
    }

    let zero = SymbolVec::zero(level);
    let mut x: Vec<SymbolVec> = vec![zero.clone(); sys.cols.len()];
    for (&i, col) in free_idx.iter().zip(&free_cols) {
        if let Some(v) = free_values.get(col) {
            assert_eq!(v.level(), level, "free value level mismatch");
            x[i] = v.clone();
        }
    }
    for (row, &p) in red.pivots.iter().enumerate() {
        let mut v = red.rhs[row].clone();
        for &f in &free_idx {
            let c = &red.mat[row][f];
            if !c.is_zero() && !x[f].is_zero() {
                v.sub_scaled(&x[f].clone(), c);
            }
        }
        x[p] = v;
    }

    let mut assignment = GammaLambdaAssignment::zero(level);
    for (i, col) in sys.cols.iter().enumerate() {
        match *col {
            Col::Lambda(a, b) => assignment.set_lambda(a, b, x[i].clone()),
            Col::Gamma(a, b) => assignment.set_gamma(a, b, x[i].clone()),
        }
    }

    let residuals: Vec<SymbolVec> = red.rhs[red.rank..].to_vec();
    let residuals_vanish = residuals.iter().all(|r| r.to_series(truncation).is_zero());
    let check = check_assignment(level, &assignment, truncation)?;
    Ok(SolveResult {
        level,
        truncation,
        assignment,
        pivot_cols,
        free_cols,
        residuals,
        residuals_vanish,
        check,
    })
}

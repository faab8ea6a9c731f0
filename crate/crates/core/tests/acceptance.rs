//! Release gate: eleven end-to-end checks covering every displayed object
//! and every proved identity the crate implements, printed one line each.
//!
//! Each criterion either reproduces a concrete displayed value exactly
//! (systems, solutions, constants) or sweeps an identity over the stated
//! desk-scale ranges.  Stated wall-clock budgets are enforced; exceeding a
//! budget fails the criterion even when the mathematics agrees.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use eisen::arith::{self, rat, rat_int, Rat};
use eisen::bernoulli::{beta_const, beta_genfun_check, vanish_symmetry_check};
use eisen::cli::AssignmentName;
use eisen::cyclotomic::{eta_block_sum, eta_block_sum_closed, CycNum};
use eisen::dz::{dz_dim, verify_sum_formula};
use eisen::gamma::{
    build_system, check_assignment, col_labels, rank_and_pivots, row_labels, solve,
    verify_null_space, Col, GammaLambdaAssignment, Row,
};
use eisen::numeric::{
    frakz_numeric, frakz_pv, frakz_vs_bernoulli, gbtz_sign_probe, verify_dbsf_numeric, ProbeSign,
};
use eisen::qseries::{divisor_identity_symbolvec, verify_divisor_identity, SymbolVec};
use eisen::shuffle::{verify_double_shuffle, verify_i_identities, Relation};
use rayon::prelude::*;

/// Lifts library errors into criterion failure messages.
fn lib<T>(r: eisen::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("library error: {}", e))
}

fn f_unit(level: u32, a: u32) -> SymbolVec {
    SymbolVec::f_unit(level, a)
}

fn g_unit(level: u32, a: u32) -> SymbolVec {
    SymbolVec::g_unit(level, a)
}

// ---------------------------------------------------------------------------
// 1. The weight-two constraint system at levels 1 and 2 equals the displayed
//    matrices and right-hand sides entry by entry (documented row order:
//    shuffle rows, then cross rows, then diagonal rows; diagonal shuffle
//    rows carry the a = b case of F_a + F_b, i.e. 2 F_a).
// ---------------------------------------------------------------------------
fn c01_weight_two_system() -> Result<String, String> {
    let s1 = lib(build_system(1))?;
    if s1.rows != vec![Row::Shuffle(0, 0)]
        || s1.cols != vec![Col::Lambda(0, 0), Col::Gamma(0, 0)]
        || s1.mat != vec![vec![rat_int(-2), rat_int(2)]]
        || s1.rhs != vec![f_unit(1, 0).scale(&rat_int(2))]
    {
        return Err("level-1 system differs from the displayed 1x2 system".into());
    }

    let s2 = lib(build_system(2))?;
    let want_cols = vec![
        Col::Lambda(0, 0),
        Col::Lambda(0, 1),
        Col::Lambda(1, 1),
        Col::Gamma(0, 1),
        Col::Gamma(0, 0),
        Col::Gamma(1, 1),
        Col::Gamma(1, 0),
    ];
    if s2.cols != want_cols {
        return Err("level-2 column order differs from the displayed unknown order".into());
    }
    // The displayed five rows, in their original order.
    let display: [[i64; 7]; 5] = [
        [-2, 0, 0, 0, 2, 0, 0],
        [0, -2, 0, 0, 0, 1, 1],
        [0, 0, -2, 2, 0, 0, 0],
        [0, 0, 0, -1, 0, 1, 0],
        [0, 0, 0, 1, 0, -1, 0],
    ];
    // Our fixed order emits the cross row before the diagonal row, so our
    // row i corresponds to displayed row perm[i].
    let perm = [0usize, 1, 2, 4, 3];
    for (i, row) in s2.mat.iter().enumerate() {
        let want: Vec<Rat> = display[perm[i]].iter().map(|&x| rat_int(x)).collect();
        if *row != want {
            return Err(format!("level-2 matrix row {} differs from the display", i));
        }
    }
    let f = |a| f_unit(2, a);
    let want_rhs = vec![
        f(0).scale(&rat_int(2)),
        f(0).add(&f(1)),
        f(1).scale(&rat_int(2)),
        f(0).add(&f(1)).neg(),
        g_unit(2, 1).sub(&f(1)),
    ];
    if s2.rhs != want_rhs {
        return Err("level-2 right-hand side differs from the displayed entries".into());
    }
    Ok("level-1 1x2 and level-2 5x7 systems match the displayed entries".into())
}

// ---------------------------------------------------------------------------
// 2. For every level N <= 20 the system has rank N^2 + N - nu(N), left
//    nullity nu(N) - 1 (so rank + nullity = N^2 + N - 1), and the free
//    columns are exactly the published set: every gamma(a,b) with b < a
//    plus gamma(N-d, N-d) for each divisor d of N (d = N giving gamma(0,0)).
// ---------------------------------------------------------------------------
fn c02_rank_and_free_columns() -> Result<String, String> {
    for n in 1..=20u32 {
        let rep = lib(rank_and_pivots(n))?;
        let nu = arith::divisor_count(n as u64) as usize;
        let expected_rank = (n * n + n) as usize - nu;
        if rep.rank != expected_rank {
            return Err(format!(
                "level {}: rank {} != {}",
                n, rep.rank, expected_rank
            ));
        }
        let rows = row_labels(n).len();
        if rows != (n * n + n - 1) as usize || rows - rep.rank != nu - 1 {
            return Err(format!(
                "level {}: row count {} and rank {} violate nullity nu(N)-1",
                n, rows, rep.rank
            ));
        }
        if !rep.pass() {
            return Err(format!(
                "level {}: pivot columns differ from expectation",
                n
            ));
        }
        let pivots: BTreeSet<Col> = rep.pivot_cols.iter().copied().collect();
        let free: BTreeSet<Col> = col_labels(n)
            .into_iter()
            .filter(|c| !pivots.contains(c))
            .collect();
        let mut want_free = BTreeSet::new();
        for a in 0..n {
            for b in 0..a {
                want_free.insert(Col::Gamma(a, b));
            }
        }
        for d in 1..=n {
            if n % d == 0 {
                want_free.insert(Col::Gamma((n - d) % n, (n - d) % n));
            }
        }
        if free != want_free {
            return Err(format!(
                "level {}: free columns differ from the published set",
                n
            ));
        }
    }
    Ok("levels 1..=20: rank N^2+N-nu(N), nullity nu(N)-1, published free columns".into())
}

// ---------------------------------------------------------------------------
// 3. For every level N <= 12 and every proper divisor d, the kernel vector
//    built from d annihilates the matrix exactly, kills the right-hand side
//    as a q-series through q^200, and equals the level-(N/d) divisor
//    identity symbol lifted back to level N, exactly.
// ---------------------------------------------------------------------------
fn c03_null_vectors() -> Result<String, String> {
    let outcomes: Vec<Result<(), String>> = (1..=12u32)
        .into_par_iter()
        .map(|n| {
            let rep = lib(verify_null_space(n, 200))?;
            let nu = arith::divisor_count(n as u64) as usize;
            if rep.per_divisor.len() != nu - 1 {
                return Err(format!(
                    "level {}: {} divisor vectors, expected {}",
                    n,
                    rep.per_divisor.len(),
                    nu - 1
                ));
            }
            if !rep.pass() {
                let bad: Vec<String> = rep
                    .per_divisor
                    .iter()
                    .filter(|d| !(d.annihilates && d.series_vanishes && d.symbol_matches_lift))
                    .map(|d| format!("d={}", d.d))
                    .collect();
                return Err(format!("level {}: failing divisors {:?}", n, bad));
            }
            Ok(())
        })
        .collect();
    for o in outcomes {
        o?;
    }
    Ok(
        "levels 1..=12: kernel vectors annihilate exactly, kill the rhs through q^200, \
        and decompose over lifted divisor-identity symbols"
            .into(),
    )
}

// ---------------------------------------------------------------------------
// 4. Zero-free-value solving reproduces the displayed closed-form solutions
//    at levels 2 and 3 (entries compared modulo the vanishing divisor-
//    identity symbol, the documented coset convention; the two level-3
//    lambda entries follow the defining equations where the display is
//    inconsistent with its own gammas).  The built-in explicit assignments
//    at levels 1..=3 satisfy every defining constraint through q^200.
// ---------------------------------------------------------------------------
fn c04_displayed_solutions() -> Result<String, String> {
    // Level 2, free values zero.
    let r2 = lib(solve(2, &HashMap::new(), 200))?;
    if !r2.pass() {
        return Err("level-2 zero-free solution fails its own constraints".into());
    }
    let v2 = lib(divisor_identity_symbolvec(2))?;
    let f = |a| f_unit(2, a);
    let g1 = g_unit(2, 1);
    let half = rat(1, 2);
    let want2: Vec<(&str, SymbolVec, SymbolVec)> = vec![
        (
            "lambda(0,0)",
            r2.assignment.lambda(0, 0).clone(),
            f(0).neg(),
        ),
        (
            "lambda(0,1)",
            r2.assignment.lambda(0, 1).clone(),
            f(1).sub(&g1).scale(&half),
        ),
        ("lambda(1,1)", r2.assignment.lambda(1, 1).clone(), g1.neg()),
        (
            "gamma(0,1)",
            r2.assignment.gamma(0, 1).clone(),
            f(1).sub(&g1),
        ),
        (
            "gamma(0,0)",
            r2.assignment.gamma(0, 0).clone(),
            SymbolVec::zero(2),
        ),
        (
            "gamma(1,1)",
            r2.assignment.gamma(1, 1).clone(),
            SymbolVec::zero(2),
        ),
        (
            "gamma(1,0)",
            r2.assignment.gamma(1, 0).clone(),
            SymbolVec::zero(2),
        ),
    ];
    for (label, got, want) in &want2 {
        if !got.sub(want).is_rational_multiple_of(&v2) {
            return Err(format!(
                "level 2: {} differs from the displayed solution",
                label
            ));
        }
    }
    // gamma(0,1) = 2 lambda(0,1) holds exactly, not just modulo the kernel.
    if r2.assignment.gamma(0, 1).clone() != r2.assignment.lambda(0, 1).scale(&rat_int(2)) {
        return Err("level 2: gamma(0,1) != 2 lambda(0,1)".into());
    }

    // Level 3, free values zero.
    let r3 = lib(solve(3, &HashMap::new(), 200))?;
    if !r3.pass() {
        return Err("level-3 zero-free solution fails its own constraints".into());
    }
    let v3 = lib(divisor_identity_symbolvec(3))?;
    let f = |a| f_unit(3, a);
    let g = |a| g_unit(3, a);
    let want3: Vec<(&str, SymbolVec, SymbolVec)> = vec![
        (
            "lambda(0,0)",
            r3.assignment.lambda(0, 0).clone(),
            f(0).neg(),
        ),
        (
            "lambda(0,1)",
            r3.assignment.lambda(0, 1).clone(),
            g(1).sub(&f(0)).sub(&f(1).scale(&rat_int(2))).scale(&half),
        ),
        (
            "lambda(0,2)",
            r3.assignment.lambda(0, 2).clone(),
            f(0).add(&f(2)).scale(&half).neg(),
        ),
        (
            "lambda(1,1)",
            r3.assignment.lambda(1, 1).clone(),
            f(1).neg(),
        ),
        // Forced by the defining equations from the displayed gammas
        // (reduced by the vanishing symbol): (F2 - G2)/2 and -G2.
        (
            "lambda(1,2)",
            r3.assignment.lambda(1, 2).clone(),
            f(2).sub(&g(2)).scale(&half),
        ),
        (
            "lambda(2,2)",
            r3.assignment.lambda(2, 2).clone(),
            g(2).neg(),
        ),
        (
            "gamma(0,1)",
            r3.assignment.gamma(0, 1).clone(),
            g(1).sub(&f(0)).sub(&f(1).scale(&rat_int(2))),
        ),
        (
            "gamma(0,2)",
            r3.assignment.gamma(0, 2).clone(),
            f(0).add(&f(2)).neg(),
        ),
        (
            "gamma(1,2)",
            r3.assignment.gamma(1, 2).clone(),
            f(2).sub(&g(2)),
        ),
        (
            "gamma(1,1)",
            r3.assignment.gamma(1, 1).clone(),
            g(1).sub(&f(1)),
        ),
        (
            "gamma(0,0)",
            r3.assignment.gamma(0, 0).clone(),
            SymbolVec::zero(3),
        ),
        (
            "gamma(2,2)",
            r3.assignment.gamma(2, 2).clone(),
            SymbolVec::zero(3),
        ),
        (
            "gamma(1,0)",
            r3.assignment.gamma(1, 0).clone(),
            SymbolVec::zero(3),
        ),
        (
            "gamma(2,0)",
            r3.assignment.gamma(2, 0).clone(),
            SymbolVec::zero(3),
        ),
        (
            "gamma(2,1)",
            r3.assignment.gamma(2, 1).clone(),
            SymbolVec::zero(3),
        ),
    ];
    for (label, got, want) in &want3 {
        if !got.sub(want).is_rational_multiple_of(&v3) {
            return Err(format!(
                "level 3: {} differs from the displayed solution",
                label
            ));
        }
    }

    // Built-in explicit assignments at levels 1..=3.
    for n in 1..=3u32 {
        let asg = lib(GammaLambdaAssignment::explicit(n))?;
        let check = lib(check_assignment(n, &asg, 200))?;
        if !check.pass() {
            return Err(format!(
                "level {}: explicit assignment fails {:?}",
                n,
                check.failing_labels()
            ));
        }
    }
    Ok(
        "zero-free solutions at levels 2 and 3 match the displayed lists \
        (modulo the vanishing symbol); explicit assignments hold through q^200"
            .into(),
    )
}

// ---------------------------------------------------------------------------
// 5. Full product-decomposition sweep: the stuffle and shuffle forms of every
//    corrected product agree coefficient-exactly through q^50 for levels
//    1..=6, all residue pairs, all order pairs with r + s <= 6, under the
//    solved-zero constants, and additionally under the built-in explicit
//    constants at levels 1..=3.
// ---------------------------------------------------------------------------
fn c05_double_shuffle_sweep() -> Result<String, String> {
    let mut cases: Vec<(u32, AssignmentName)> =
        (1..=6).map(|n| (n, AssignmentName::SolvedZero)).collect();
    cases.extend((1..=3).map(|n| (n, AssignmentName::Explicit)));
    let outcomes: Vec<Result<(), String>> = cases
        .par_iter()
        .map(|&(n, which)| {
            let asg = lib(which.resolve(n, 50))?;
            let rep = lib(verify_double_shuffle(n, &asg, 6, 50, true))?;
            let expected_rows = 2 * 15 * (n * n) as usize; // 15 order pairs per residue pair
            if rep.rows.len() != expected_rows {
                return Err(format!(
                    "level {}: {} relation rows, expected {}",
                    n,
                    rep.rows.len(),
                    expected_rows
                ));
            }
            if !rep.pass() {
                let first = rep.failures()[0];
                return Err(format!(
                    "level {} ({:?}): first failure at ({},{};{},{}) {}",
                    n,
                    which,
                    first.a,
                    first.b,
                    first.r,
                    first.s,
                    first.relation.as_str()
                ));
            }
            Ok(())
        })
        .collect();
    for o in outcomes {
        o?;
    }
    Ok(
        "levels 1..=6 solved-zero and 1..=3 explicit: all 2x15xN^2 relations exact through q^50"
            .into(),
    )
}

// ---------------------------------------------------------------------------
// 6. Divisor-sum identities: the weight-two divisor identity holds exactly
//    for all levels 2..=30 and coefficients m <= 500, and every residue
//    block sum of roots of unity matches its closed form for levels 2..=60
//    with each twist exponent up to its prime multiplicity plus one.
// ---------------------------------------------------------------------------
fn c06_divisor_identities() -> Result<String, String> {
    let outcomes: Vec<Result<(), String>> = (2..=30u32)
        .into_par_iter()
        .map(|n| {
            for m in 1..=500u32 {
                let check = lib(verify_divisor_identity(n, m))?;
                if !check.pass() {
                    return Err(format!("divisor identity fails at level {}, q^{}", n, m));
                }
            }
            Ok(())
        })
        .collect();
    for o in outcomes {
        o?;
    }

    let eta_outcomes: Vec<Result<usize, String>> = (2..=60u32)
        .into_par_iter()
        .map(|n| {
            let exponents: Vec<u32> = arith::factorize(n as u64).iter().map(|&(_, k)| k).collect();
            let mut cases = 0usize;
            for alpha in boxed_vectors(&exponents) {
                if alpha == exponents {
                    continue; // empty residue block
                }
                let ell_bounds: Vec<u32> = exponents.iter().map(|&k| k + 1).collect();
                for ell in boxed_vectors(&ell_bounds) {
                    cases += 1;
                    let sum = lib(eta_block_sum(n, &alpha, &ell))?;
                    let closed = lib(eta_block_sum_closed(n, &alpha, &ell))?;
                    if sum != closed {
                        return Err(format!(
                            "block sum differs from closed form at level {}, alpha {:?}, ell {:?}",
                            n, alpha, ell
                        ));
                    }
                }
            }
            Ok(cases)
        })
        .collect();
    let mut eta_cases = 0usize;
    for o in eta_outcomes {
        eta_cases += o?;
    }
    Ok(format!(
        "divisor identity exact for levels 2..=30 through q^500; {} block sums match \
         their closed form for levels 2..=60",
        eta_cases
    ))
}

// ---------------------------------------------------------------------------
// 7. Formal bilinear identities: for levels 1..=4 and weights 2..=6, the
//    swapped-argument and composed-argument sums collapse to the target
//    two-term form over free symbols (weight 2 via its composed form).
// ---------------------------------------------------------------------------
fn c07_formal_identities() -> Result<String, String> {
    for n in 1..=4u32 {
        for k in 2..=6u32 {
            let rep = lib(verify_i_identities(n, k))?;
            if !rep.pass() {
                return Err(format!("level {}, weight {}: {:?}", n, k, rep.failures));
            }
        }
    }
    Ok("levels 1..=4, weights 2..=6 (including the weight-2 case): all identities hold".into())
}

// ---------------------------------------------------------------------------
// 8. Beta constants: the generating function reproduces every constant
//    through order 12 for levels 1..=12; the two displayed order-2 values
//    are exact; conjugation acts by (-1)^n for levels 1..=20, n <= 12.
// ---------------------------------------------------------------------------
fn c08_beta_machinery() -> Result<String, String> {
    for n in 1..=12u32 {
        for a in 0..n {
            let check = lib(beta_genfun_check(n, a, 12))?;
            if !check.pass() {
                return Err(format!(
                    "level {}, residue {}: generating function mismatch at orders {:?}",
                    n, a, check.mismatches
                ));
            }
        }
    }
    let b1 = lib(beta_const(1, 0, 2))?;
    if b1 != CycNum::from_rat(1, rat(-1, 24)) {
        return Err("order-2 constant at level 1 is not -1/24".into());
    }
    let b2 = lib(beta_const(2, 1, 2))?;
    if b2 != CycNum::from_rat(2, rat(-1, 32)) {
        return Err("order-2 constant at level 2, residue 1 is not -1/32".into());
    }
    for n in 1..=20u32 {
        for order in 1..=12u32 {
            let check = lib(vanish_symmetry_check(n, order))?;
            if !check.pass() {
                return Err(format!(
                    "level {}, order {}: conjugation symmetry fails at residues {:?}",
                    n, order, check.failures
                ));
            }
        }
    }
    Ok(
        "generating function exact to order 12 for levels 1..=12; -1/24 and -1/32 \
        reproduced; conjugation symmetry holds for levels 1..=20"
            .into(),
    )
}

// ---------------------------------------------------------------------------
// 9. Formal double zeta spaces: exact ranks give dim >= ((k-2)N^2 + 2N)/2
//    for even weights k <= 10 at levels 1..=3; the pure level-3 weight-4
//    space reports the claimed dimension 11 for its double-symbol quotient
//    (full generator list: 13), with the counting ambiguity noted in the
//    report; both weighted sum formulas lie in the relation row space for
//    levels 1..=4, even weights k <= 10, every residue.
// ---------------------------------------------------------------------------
fn c09_formal_double_zeta() -> Result<String, String> {
    for n in 1..=3u32 {
        for k in (2..=10u32).step_by(2) {
            let rep = lib(dz_dim(n, k, false))?;
            let bound = rep.printed_bound.ok_or("missing even-weight bound")?;
            if (rep.dim as i64) < bound {
                return Err(format!(
                    "level {}, weight {}: dim {} below bound {}",
                    n, k, rep.dim, bound
                ));
            }
            if rep.generators != rep.rank + rep.dim {
                return Err(format!(
                    "level {}, weight {}: rank bookkeeping broken",
                    n, k
                ));
            }
        }
    }
    let pure = lib(dz_dim(3, 4, true))?;
    if pure.doubles_dim != 11 || pure.dim != 13 || pure.note.is_none() {
        return Err(format!(
            "pure level-3 weight-4 space: doubles_dim {}, dim {}, note {:?}",
            pure.doubles_dim,
            pure.dim,
            pure.note.is_some()
        ));
    }
    let sum_cells: Vec<(u32, u32, u32)> = (1..=4u32)
        .flat_map(|n| {
            (2..=10u32)
                .step_by(2)
                .flat_map(move |k| (0..n).map(move |a| (n, k, a)))
        })
        .collect();
    let outcomes: Vec<Result<(), String>> = sum_cells
        .par_iter()
        .map(|&(n, k, a)| {
            let rep = lib(verify_sum_formula(n, k, a))?;
            if !rep.pass() {
                return Err(format!(
                    "sum formula not in row space at level {}, weight {}, residue {}",
                    n, k, a
                ));
            }
            Ok(())
        })
        .collect();
    for o in outcomes {
        o?;
    }
    Ok(
        "even weights <= 10: dims meet the bound (levels 1..=3); pure (3,4) reports 11 \
        with the counting note; sum formulas are members for levels 1..=4"
            .into(),
    )
}

// ---------------------------------------------------------------------------
// 10. Numeric corroboration: double-shuffle decompositions of convergent
//     products within 1e-6 (levels 1..=3, orders >= 2, total <= 8); the
//     symmetrized sums match their finite closed forms within 1e-8 for
//     levels 1..=6, orders <= 8 (including pi/8 at level 4, residue 1) and
//     match the principal-value definition for orders 2..=4; the sign probe
//     resolves the same shift sign at every residue of every level <= 8.
// ---------------------------------------------------------------------------
fn c10_numeric_corroboration() -> Result<String, String> {
    let mut dbsf_cells = Vec::new();
    for n in 1..=3u32 {
        for a in 0..n {
            for b in 0..n {
                for r in 2..=6u32 {
                    for s in 2..=6u32 {
                        if r + s <= 8 {
                            dbsf_cells.push((n, a, b, r, s));
                        }
                    }
                }
            }
        }
    }
    let outcomes: Vec<Result<(), String>> = dbsf_cells
        .par_iter()
        .map(|&(n, a, b, r, s)| {
            let rep = lib(verify_dbsf_numeric(n, a, b, r, s, 1e-6))?;
            if !rep.pass() {
                return Err(format!(
                    "numeric double shuffle fails at level {}, ({},{};{},{})",
                    n, a, b, r, s
                ));
            }
            Ok(())
        })
        .collect();
    for o in outcomes {
        o?;
    }

    for n in 1..=6u32 {
        for a in 0..n {
            for order in 1..=8u32 {
                if !lib(frakz_vs_bernoulli(n, a, order, 1e-8))? {
                    return Err(format!(
                        "symmetrized sum differs from closed form at level {}, residue {}, order {}",
                        n, a, order
                    ));
                }
            }
        }
    }
    let z41 = lib(frakz_numeric(4, 1, 1))?;
    let pi_over_8 = std::f64::consts::PI / 8.0;
    if (z41.value.re - pi_over_8).abs() > 1e-8 || z41.value.im.abs() > 1e-8 {
        return Err(format!(
            "level-4 residue-1 order-1 value {} differs from pi/8",
            z41.value.re
        ));
    }
    for n in 1..=6u32 {
        for a in 0..n {
            for order in 2..=4u32 {
                let pv = frakz_pv(n, a, order, 1_000_000);
                let closed = lib(frakz_numeric(n, a, order))?;
                let gap = (pv.value - closed.value).norm();
                if gap > 1e-8 + pv.error_bound + closed.error_bound {
                    return Err(format!(
                        "principal value differs from half-sum at level {}, residue {}, order {}",
                        n, a, order
                    ));
                }
            }
        }
    }

    let mut resolved = None;
    for n in 1..=8u32 {
        for a in 0..n {
            let probe = lib(gbtz_sign_probe(n, a, 1e-9))?;
            if !probe.higher_orders_match {
                return Err(format!(
                    "unexpected shift at orders >= 2, level {}, residue {}",
                    n, a
                ));
            }
            match (&resolved, probe.sign) {
                (_, ProbeSign::Anomaly) => {
                    return Err(format!(
                        "sign probe anomalous at level {}, residue {}",
                        n, a
                    ));
                }
                (None, s) => resolved = Some(s),
                (Some(prev), s) if *prev != s => {
                    return Err(format!("inconsistent sign at level {}, residue {}", n, a));
                }
                _ => {}
            }
        }
    }
    let sign = match resolved {
        Some(ProbeSign::Minus) => "minus",
        Some(ProbeSign::Plus) => "plus",
        _ => return Err("no sign resolved".into()),
    };
    Ok(format!(
        "double-shuffle, closed-form, pi/8, and principal-value checks all inside \
         tolerance; sign probe resolves '{}' at every residue, levels 1..=8",
        sign
    ))
}

// ---------------------------------------------------------------------------
// 11. Negative controls: a perturbed gamma breaks exactly the two defining
//     constraints that mention it, and a perturbed lambda makes the series
//     sweep fail first at the order-(1,1) stuffle cell — the checks detect
//     single-coefficient errors.
// ---------------------------------------------------------------------------
fn c11_negative_controls() -> Result<String, String> {
    let mut asg = lib(GammaLambdaAssignment::explicit(2))?;
    asg.perturb_gamma(1, 1, 1, CycNum::one(2));
    let check = lib(check_assignment(2, &asg, 30))?;
    let mut failing = check.failing_labels();
    failing.sort();
    if failing != vec!["shuffle(0,1)", "stuffle(1,1)"] {
        return Err(format!(
            "perturbed gamma(1,1) failed {:?}, expected exactly the two touched equations",
            failing
        ));
    }

    let mut asg1 = lib(GammaLambdaAssignment::explicit(1))?;
    asg1.perturb_lambda(0, 0, 1, CycNum::one(1));
    let rep = lib(verify_double_shuffle(1, &asg1, 4, 15, false))?;
    let failures = rep.failures();
    if failures.is_empty() {
        return Err("perturbed lambda went undetected".into());
    }
    let first = failures[0];
    if (first.r, first.s, first.relation) != (1, 1, Relation::Stuffle) {
        return Err(format!(
            "first failure at ({},{}) {}, expected the (1,1) stuffle cell",
            first.r,
            first.s,
            first.relation.as_str()
        ));
    }
    if !failures.iter().all(|row| (row.r, row.s) == (1, 1)) {
        return Err("perturbed lambda leaked beyond weight 2".into());
    }
    Ok(
        "gamma bump fails exactly {shuffle(0,1), stuffle(1,1)}; lambda bump fails first \
        at the (1,1) stuffle cell and nowhere beyond weight 2"
            .into(),
    )
}

/// Enumerates all coordinate vectors with entry t in 0..=bounds[t].
fn boxed_vectors(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

type Criterion = fn() -> Result<String, String>;

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Option<f64>, Criterion)> = vec![
        (
            "weight-two system reproduction",
            Some(1.0),
            c01_weight_two_system,
        ),
        (
            "rank, nullity, and free columns",
            Some(60.0),
            c02_rank_and_free_columns,
        ),
        ("null-vector consistency", Some(120.0), c03_null_vectors),
        (
            "displayed closed-form solutions",
            None,
            c04_displayed_solutions,
        ),
        (
            "double-shuffle sweep",
            Some(600.0),
            c05_double_shuffle_sweep,
        ),
        (
            "divisor-sum identities",
            Some(300.0),
            c06_divisor_identities,
        ),
        (
            "formal bilinear identities",
            Some(60.0),
            c07_formal_identities,
        ),
        ("beta constants", None, c08_beta_machinery),
        ("formal double zeta spaces", None, c09_formal_double_zeta),
        ("numeric corroboration", None, c10_numeric_corroboration),
        ("negative controls", None, c11_negative_controls),
    ];

    let mut failures = Vec::new();
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = f();
        let elapsed = started.elapsed().as_secs_f64();
        let in_budget = budget.is_none_or(|b| elapsed <= b);
        let budget_note = budget
            .map(|b| format!(", budget {:.0}s", b))
            .unwrap_or_default();
        match (&outcome, in_budget) {
            (Ok(detail), true) => {
                println!(
                    "criterion {:2} [PASS] {}: {} ({:.1}s{})",
                    i + 1,
                    name,
                    detail,
                    elapsed,
                    budget_note
                );
            }
            (Ok(_), false) => {
                println!(
                    "criterion {:2} [FAIL] {}: exceeded wall-clock budget ({:.1}s{})",
                    i + 1,
                    name,
                    elapsed,
                    budget_note
                );
                failures.push(format!("{} (over budget)", name));
            }
            (Err(msg), _) => {
                println!(
                    "criterion {:2} [FAIL] {}: {} ({:.1}s{})",
                    i + 1,
                    name,
                    msg,
                    elapsed,
                    budget_note
                );
                failures.push(format!("{}: {}", name, msg));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {:#?}", failures);
}

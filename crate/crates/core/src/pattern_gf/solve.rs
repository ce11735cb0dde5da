//! Degree-by-degree solution of the planted-tree systems for a double-star.
//!
//! Planted trees are split by the degree of their root (the plant edge
//! counts toward that degree). Every right-hand side carries a factor `x`, so
//! coefficient `n` of each unknown is determined by coefficients `< n`, and a
//! single forward sweep solves the system exactly.
//!
//! A sum `Σ_{ℓ1+ℓ2=L} Z(S_ℓ1; A)·Z(S_ℓ2; B)·u^ℓ2` is evaluated as the single
//! cycle index `Z(S_L; A + u·B)`, since `u^ℓ2` is exactly the weight that
//! `u·B` contributes under plethystic substitution.

use serde::{Deserialize, Serialize};

use crate::pseries::{cycle_index_apply, sym_exp, Coeff, CycleTower, EulerTower, Series};
use crate::treelab::{CaseKind, PatternSpec};

use super::{GfError, SystemSolution};

/// How the case-1 rooted series sums over roots of degree `j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `Z(S_m1; a0 + aj)·Z(S_m2; ai)·u^m2`, symmetric with the `aj` equation.
    #[default]
    Repaired,
    /// `Z(S_m1; a0 + ai)·Z(S_m2; aj)·u^m2`, the same factors as the degree-`i`
    /// sum.
    Literal,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Repaired => "repaired",
            Variant::Literal => "literal",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "repaired" => Ok(Variant::Repaired),
            "literal" => Ok(Variant::Literal),
            other => Err(format!("unknown variant {other:?} (repaired|literal)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub variant: Variant,
    /// Re-evaluate every right-hand side on the finished series with the
    /// batch operators and require that nothing changes.
    pub verify_fixed_point: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            variant: Variant::Repaired,
            verify_fixed_point: true,
        }
    }
}

/// Solves the system matching the pattern's case.
pub fn solve<C: Coeff>(
    pattern: PatternSpec,
    order: usize,
    proto: &C,
    opts: SolveOptions,
) -> Result<SystemSolution<C>, GfError> {
    let sol = match pattern.case_kind() {
        CaseKind::DistinctBoth => case1(pattern, order, proto, opts.variant),
        CaseKind::OneIsLeaf => case2(pattern, order, proto),
        CaseKind::Equal => case3(pattern, order, proto),
    };
    if opts.verify_fixed_point {
        verify_fixed_point(&sol)?;
    }
    Ok(sol)
}

/// Case `1 < i < j`.
pub fn solve_case1<C: Coeff>(
    i: usize,
    j: usize,
    order: usize,
    proto: &C,
    opts: SolveOptions,
) -> Result<SystemSolution<C>, GfError> {
    let pattern = PatternSpec::new(i, j)?;
    if i >= j || pattern.case_kind() != CaseKind::DistinctBoth {
        return Err(GfError::WrongCase {
            pattern,
            expected: CaseKind::DistinctBoth,
        });
    }
    solve(pattern, order, proto, opts)
}

/// Case `i = 1 < j`.
pub fn solve_case2<C: Coeff>(
    j: usize,
    order: usize,
    proto: &C,
    opts: SolveOptions,
) -> Result<SystemSolution<C>, GfError> {
    let pattern = PatternSpec::new(1, j)?;
    solve(pattern, order, proto, opts)
}

/// Case `i = j > 1`.
pub fn solve_case3<C: Coeff>(
    j: usize,
    order: usize,
    proto: &C,
    opts: SolveOptions,
) -> Result<SystemSolution<C>, GfError> {
    let pattern = PatternSpec::new(j, j)?;
    if pattern.case_kind() != CaseKind::Equal {
        return Err(GfError::WrongCase {
            pattern,
            expected: CaseKind::Equal,
        });
    }
    solve(pattern, order, proto, opts)
}

fn sum3<C: Coeff>(a: &C, b: &C, c: &C) -> C {
    let mut s = a.clone();
    s.add_assign_ref(b);
    s.add_assign_ref(c);
    s
}

fn zeros<C: Coeff>(order: usize, proto: &C) -> Vec<C> {
    vec![proto.zero_like(); order + 1]
}

/// `t = r − ½p² + ½p(x², u²) + extra`, with `doubled_extra = 2·extra`.
fn assemble_free<C: Coeff>(r: &Series<C>, p: &Series<C>, doubled_extra: &Series<C>) -> Series<C> {
    r.scale(&2.into())
        .sub(&p.mul(p))
        .add(&p.pleth(2))
        .add(doubled_extra)
        .div_exact(2)
}

fn case1<C: Coeff>(
    pattern: PatternSpec,
    order: usize,
    proto: &C,
    variant: Variant,
) -> SystemSolution<C> {
    let (i, j) = (pattern.i(), pattern.j());
    let mut a0 = zeros(order, proto);
    let mut ai = zeros(order, proto);
    let mut aj = zeros(order, proto);
    let mut p = zeros(order, proto);
    // a0 + ai + u·aj and a0 + aj + u·ai
    let mut s_i = zeros(order, proto);
    let mut s_j = zeros(order, proto);

    let mut euler = EulerTower::new(proto);
    let mut zp = CycleTower::new(j);
    let zi_top = match variant {
        Variant::Repaired => i,
        Variant::Literal => j,
    };
    let mut zi = CycleTower::new(zi_top);
    let mut zj = CycleTower::new(j);

    for n in 1..=order {
        let d = n - 1;
        euler.push(&p);
        zp.push(&p);
        zi.push(&s_i);
        zj.push(&s_j);

        let mut v0 = euler.get(d).clone();
        v0.sub_assign_ref(zp.get(i - 1, d));
        v0.sub_assign_ref(zp.get(j - 1, d));
        let vi = zi.get(i - 1, d).clone();
        let vj = zj.get(j - 1, d).clone();

        p[n] = sum3(&v0, &vi, &vj);
        s_i[n] = sum3(&v0, &vi, &vj.shift_u(1));
        s_j[n] = sum3(&v0, &vj, &vi.shift_u(1));
        a0[n] = v0;
        ai[n] = vi;
        aj[n] = vj;
    }

    let mut r = zeros(order, proto);
    for n in 1..=order {
        let d = n - 1;
        let mut v = euler.get(d).clone();
        v.sub_assign_ref(zp.get(i, d));
        v.sub_assign_ref(zp.get(j, d));
        v.add_assign_ref(zi.get(i, d));
        match variant {
            Variant::Repaired => v.add_assign_ref(zj.get(j, d)),
            Variant::Literal => v.add_assign_ref(zi.get(j, d)),
        }
        r[n] = v;
    }

    let (a0, ai, aj, p, r) = (
        Series::from_coeffs(a0),
        Series::from_coeffs(ai),
        Series::from_coeffs(aj),
        Series::from_coeffs(p),
        Series::from_coeffs(r),
    );
    let extra = ai.mul(&aj).one_minus_u().scale(&2.into());
    let t = assemble_free(&r, &p, &extra);
    SystemSolution::new(pattern, variant, a0, ai, aj, p, r, t)
}

fn case2<C: Coeff>(pattern: PatternSpec, order: usize, proto: &C) -> SystemSolution<C> {
    let j = pattern.j();
    let one = proto.one_like();
    let mut a0 = zeros(order, proto);
    let mut aj = zeros(order, proto);
    let mut p = zeros(order, proto);
    // p − x + u·x
    let mut s = zeros(order, proto);

    let mut euler = EulerTower::new(proto);
    let mut zp = CycleTower::new(j);
    let mut zs = CycleTower::new(j);

    for n in 1..=order {
        let d = n - 1;
        euler.push(&p);
        zp.push(&p);
        zs.push(&s);

        let mut v0 = euler.get(d).clone();
        if n == 1 {
            v0.sub_assign_ref(&one);
        }
        v0.sub_assign_ref(zp.get(j - 1, d));
        let vj = zs.get(j - 1, d).clone();

        let mut pn = v0.clone();
        pn.add_assign_ref(&vj);
        let mut sn = pn.clone();
        if n == 1 {
            pn.add_assign_ref(&one);
            sn.add_assign_ref(&one.shift_u(1));
        }
        p[n] = pn;
        s[n] = sn;
        a0[n] = v0;
        aj[n] = vj;
    }

    let aj = Series::from_coeffs(aj);
    let x = Series::x(order, proto);
    // r = x(E − Z_j(p) + Z_j(p − x + ux)) − x·aj·(1 − u)
    let mut r = zeros(order, proto);
    for n in 1..=order {
        let d = n - 1;
        let mut v = euler.get(d).clone();
        v.sub_assign_ref(zp.get(j, d));
        v.add_assign_ref(zs.get(j, d));
        v.sub_assign_ref(&aj.coeff(d).one_minus_u());
        r[n] = v;
    }
    let (a0, p, r) = (
        Series::from_coeffs(a0),
        Series::from_coeffs(p),
        Series::from_coeffs(r),
    );
    let extra = x.mul(&aj).one_minus_u().scale(&2.into());
    let t = assemble_free(&r, &p, &extra);
    SystemSolution::new(pattern, Variant::Repaired, a0, x, aj, p, r, t)
}

fn case3<C: Coeff>(pattern: PatternSpec, order: usize, proto: &C) -> SystemSolution<C> {
    let j = pattern.j();
    let mut a0 = zeros(order, proto);
    let mut aj = zeros(order, proto);
    let mut p = zeros(order, proto);
    // a0 + u·aj
    let mut s = zeros(order, proto);

    let mut euler = EulerTower::new(proto);
    let mut zp = CycleTower::new(j);
    let mut zs = CycleTower::new(j);

    for n in 1..=order {
        let d = n - 1;
        euler.push(&p);
        zp.push(&p);
        zs.push(&s);

        let mut v0 = euler.get(d).clone();
        v0.sub_assign_ref(zp.get(j - 1, d));
        let vj = zs.get(j - 1, d).clone();

        let mut pn = v0.clone();
        pn.add_assign_ref(&vj);
        let mut sn = v0.clone();
        sn.add_assign_ref(&vj.shift_u(1));
        p[n] = pn;
        s[n] = sn;
        a0[n] = v0;
        aj[n] = vj;
    }

    let mut r = zeros(order, proto);
    for n in 1..=order {
        let d = n - 1;
        let mut v = euler.get(d).clone();
        v.sub_assign_ref(zp.get(j, d));
        v.add_assign_ref(zs.get(j, d));
        r[n] = v;
    }
    let (a0, aj, p, r) = (
        Series::from_coeffs(a0),
        Series::from_coeffs(aj),
        Series::from_coeffs(p),
        Series::from_coeffs(r),
    );
    // 2·(½aj²(1−u) − ½aj(x²,u²)(1−u))
    let extra = aj.mul(&aj).sub(&aj.pleth(2)).one_minus_u();
    let t = assemble_free(&r, &p, &extra);
    SystemSolution::new(pattern, Variant::Repaired, a0, aj.clone(), aj, p, r, t)
}

/// Recomputes each right-hand side from the finished series with the batch
/// operators and checks that it reproduces the unknowns.
pub fn verify_fixed_point<C: Coeff>(sol: &SystemSolution<C>) -> Result<(), GfError> {
    let (i, j) = (sol.pattern.i(), sol.pattern.j());
    let order = sol.order();
    let proto = sol.p.proto().clone();
    let x = Series::x(order, &proto);
    let e = sym_exp(&sol.p).expect("p has no constant term");
    let check = |name: &'static str, rhs: Series<C>, lhs: &Series<C>| -> Result<(), GfError> {
        match (0..=order).find(|&n| rhs.coeff(n) != lhs.coeff(n)) {
            None => Ok(()),
            Some(degree) => Err(GfError::FixedPointMismatch { series: name, degree }),
        }
    };
    match sol.pattern.case_kind() {
        CaseKind::DistinctBoth => {
            let a0_rhs = e
                .sub(&cycle_index_apply(i - 1, &sol.p))
                .sub(&cycle_index_apply(j - 1, &sol.p))
                .mul_x();
            check("a0", a0_rhs, &sol.a0)?;
            let s_i = sol.a0.add(&sol.ai).add(&sol.aj.shift_u(1));
            check("ai", cycle_index_apply(i - 1, &s_i).mul_x(), &sol.ai)?;
            let s_j = sol.a0.add(&sol.aj).add(&sol.ai.shift_u(1));
            check("aj", cycle_index_apply(j - 1, &s_j).mul_x(), &sol.aj)?;
            check("p", sol.a0.add(&sol.ai).add(&sol.aj), &sol.p)?;
        }
        CaseKind::OneIsLeaf => {
            let a0_rhs = e
                .sub(&Series::one(order, &proto))
                .sub(&cycle_index_apply(j - 1, &sol.p))
                .mul_x();
            check("a0", a0_rhs, &sol.a0)?;
            let s = sol.p.sub(&x).add(&x.shift_u(1));
            check("aj", cycle_index_apply(j - 1, &s).mul_x(), &sol.aj)?;
            check("p", x.add(&sol.a0).add(&sol.aj), &sol.p)?;
        }
        CaseKind::Equal => {
            let a0_rhs = e.sub(&cycle_index_apply(j - 1, &sol.p)).mul_x();
            check("a0", a0_rhs, &sol.a0)?;
            let s = sol.a0.add(&sol.aj.shift_u(1));
            check("aj", cycle_index_apply(j - 1, &s).mul_x(), &sol.aj)?;
            check("p", sol.a0.add(&sol.aj), &sol.p)?;
        }
    }
    Ok(())
}

//! Closed-form algebra for the mixed potential
//! `V(r) = a r + b r² + c/r + l(l+1)/r²`.
//!
//! A superpotential `W(r) = A r − B/r + D` factorizes `V − E₀` when the
//! parameters obey `l(l+1) = c²b/a² + c√b/a`. Holding `(l, b, c)` fixed and
//! solving that constraint for `a` at every step of the partner chain gives a
//! hierarchy of potentials whose ground energies are the levels of `V`.
//!
//! Units are `ħ²/2m = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used by strict constraint checks.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

/// Coefficients `(a, b, c, l)` of the mixed potential plus a constant energy offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub l: f64,
    #[serde(default)]
    pub offset: f64,
}

impl PotentialParams {
    pub fn new(a: f64, b: f64, c: f64, l: f64) -> Self {
        Self {
            a,
            b,
            c,
            l,
            offset: 0.0,
        }
    }

    pub fn with_offset(self, offset: f64) -> Self {
        Self { offset, ..self }
    }

    /// Unchecked evaluation; callers guarantee `r > 0`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let inv = 1.0 / r;
        self.a * r
            + self.b * r * r
            + self.c * inv
            + self.l * (self.l + 1.0) * inv * inv
            + self.offset
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.value(r))
    }
}

/// How the parameters are going to be used. The numeric solver accepts any
/// confining mixed potential, whereas the superpotential algebra needs `c ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Usage {
    Numeric,
    Constrained,
}

/// Parameters that passed [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams(PotentialParams);

impl ValidatedParams {
    pub fn params(&self) -> &PotentialParams {
        &self.0
    }

    pub fn into_inner(self) -> PotentialParams {
        self.0
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = PotentialParams;

    fn deref(&self) -> &PotentialParams {
        &self.0
    }
}

pub fn validate_params(p: PotentialParams, usage: Usage) -> Result<ValidatedParams> {
    for (name, v) in [
        ("a", p.a),
        ("b", p.b),
        ("c", p.c),
        ("l", p.l),
        ("offset", p.offset),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFiniteParam { name });
        }
    }
    if p.b <= 0.0 {
        return Err(Error::NonPositiveB(p.b));
    }
    if p.l < 0.0 {
        return Err(Error::NegativeL(p.l));
    }
    if usage == Usage::Constrained && p.c == 0.0 {
        return Err(Error::ZeroC);
    }
    Ok(ValidatedParams(p))
}

fn validate_independent(l: f64, b: f64, c: f64) -> Result<()> {
    validate_params(PotentialParams::new(0.0, b, c, l), Usage::Constrained).map(|_| ())
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveR(r))
    }
}

/// Superpotential `W(r) = A r − B/r + D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpotentialParams {
    /// `A`, coefficient of `r`.
    #[serde(rename = "A")]
    pub slope: f64,
    /// `B`, coefficient of `−1/r`.
    #[serde(rename = "B")]
    pub pole: f64,
    /// `D`, constant term.
    #[serde(rename = "D")]
    pub shift: f64,
}

/// Result of matching `W² − W′` against a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpotentialMatch {
    pub params: SuperpotentialParams,
    /// `B(B−1) − l(l+1)`; zero exactly when the constraint holds.
    pub residual: f64,
}

/// Matches `W² − W′ = V − E₀` coefficient by coefficient.
///
/// The `r²`, `r` and `1/r` channels fix `A`, `D` and `B`; the inverse-square
/// channel is then an extra condition whose residual is reported. In strict
/// mode a residual beyond `1e-9·max(1, l(l+1))` or a non-positive `B` is an
/// error.
pub fn match_superpotential(p: &PotentialParams, strict: bool) -> Result<SuperpotentialMatch> {
    let p = validate_params(*p, Usage::Constrained)?;
    if p.a == 0.0 {
        return Err(Error::ZeroA);
    }
    let root_b = p.b.sqrt();
    let params = SuperpotentialParams {
        slope: root_b,
        pole: -root_b * p.c / p.a,
        shift: p.a / (2.0 * root_b),
    };
    let centrifugal = p.l * (p.l + 1.0);
    let residual = params.pole * (params.pole - 1.0) - centrifugal;
    if strict {
        if params.pole <= 0.0 {
            return Err(Error::NonPositivePole(params.pole));
        }
        if residual.abs() > CONSTRAINT_TOLERANCE * centrifugal.max(1.0) {
            return Err(Error::ConstraintViolated { residual });
        }
    }
    Ok(SuperpotentialMatch { params, residual })
}

/// Both roots of `l(l+1)a² − c√b·a − c²b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRoots {
    /// `c√b/l`; absent for `l = 0`, where the quadratic degenerates to linear.
    pub plus_root: Option<f64>,
    /// `−c√b/(l+1)`.
    pub minus_root: f64,
    /// The root that carries `l → l+1` down the hierarchy (always `minus_root`).
    pub selected: f64,
}

pub fn solve_constraint(l_eff: f64, b: f64, c: f64) -> Result<ConstraintRoots> {
    validate_independent(l_eff, b, c)?;
    let scale = c * b.sqrt();
    let plus_root = (l_eff > 0.0).then(|| scale / l_eff);
    let minus_root = -scale / (l_eff + 1.0);
    Ok(ConstraintRoots {
        plus_root,
        minus_root,
        selected: minus_root,
    })
}

/// Left-hand side of the quadratic constraint, for checking roots.
pub fn constraint_quadratic(l_eff: f64, b: f64, c: f64, a: f64) -> f64 {
    l_eff * (l_eff + 1.0) * a * a - c * b.sqrt() * a - c * c * b
}

/// `E₀ = −a²/(4b) − 2bc/a + √b`, the ground energy of the bare potential
/// (offset excluded). Meaningful only when the constraint holds.
pub fn ground_energy_bare(p: &PotentialParams) -> Result<f64> {
    let p = validate_params(*p, Usage::Constrained)?;
    if p.a == 0.0 {
        return Err(Error::ZeroA);
    }
    Ok(-p.a * p.a / (4.0 * p.b) - 2.0 * p.b * p.c / p.a + p.b.sqrt())
}

/// `R = D² − 2AB + A`, the constant left over in `W² + W′`.
pub fn remainder(sp: &SuperpotentialParams) -> f64 {
    sp.shift * sp.shift - 2.0 * sp.slope * sp.pole + sp.slope
}

/// Level `k` of the original potential:
/// `E_k = −c²/(4(l+k+1)²) + 2√b(l+1) + (4k+1)√b`.
pub fn closed_form_energy(l: f64, b: f64, c: f64, k: usize) -> f64 {
    let root_b = b.sqrt();
    let kf = k as f64;
    let m = l + kf + 1.0;
    -c * c / (4.0 * m * m) + 2.0 * root_b * (l + 1.0) + (4.0 * kf + 1.0) * root_b
}

/// Member `k` of the hierarchy, stored as a bare mixed potential with
/// translated `(a_k, l_k)` and accumulated scale offset `2k√b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyMember {
    pub k: usize,
    pub params: PotentialParams,
    pub superpotential: SuperpotentialParams,
    pub remainder: f64,
    /// Ground energy of this member in the original energy scale.
    pub ground_energy: f64,
}

impl HierarchyMember {
    /// The member's potential without its scale offset.
    pub fn bare(&self) -> PotentialParams {
        self.params.with_offset(0.0)
    }
}

pub fn build_hierarchy(l: f64, b: f64, c: f64, k_max: usize) -> Result<Vec<HierarchyMember>> {
    validate_independent(l, b, c)?;
    let root_b = b.sqrt();
    (0..=k_max)
        .map(|k| {
            let l_k = l + k as f64;
            let a_k = solve_constraint(l_k, b, c)?.selected;
            let params = PotentialParams::new(a_k, b, c, l_k).with_offset(2.0 * k as f64 * root_b);
            let sp = match_superpotential(&params, true)?.params;
            Ok(HierarchyMember {
                k,
                params,
                superpotential: sp,
                remainder: remainder(&sp),
                ground_energy: closed_form_energy(l, b, c, k),
            })
        })
        .collect()
}

pub fn eval_potential(member: &HierarchyMember, r: f64) -> Result<f64> {
    member.params.eval(r)
}

pub fn eval_superpotential(sp: &SuperpotentialParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(sp.slope * r - sp.pole / r + sp.shift)
}

/// Unnormalized ground state `r^B exp(−A r²/2 − D r)`, whose logarithmic
/// derivative is `−W`.
pub fn ground_wavefunction(sp: &SuperpotentialParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok((sp.pole * r.ln() - 0.5 * sp.slope * r * r - sp.shift * r).exp())
}

/// Laurent coefficients of a potential of the form
/// `α/r² + β/r + γ + δ r + ε r²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentCoefficients {
    pub inverse_square: f64,
    pub inverse: f64,
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl LaurentCoefficients {
    /// `W² − W′`.
    pub fn riccati(sp: &SuperpotentialParams) -> Self {
        let SuperpotentialParams {
            slope: a,
            pole: b,
            shift: d,
        } = *sp;
        Self {
            inverse_square: b * b - b,
            inverse: -2.0 * b * d,
            constant: d * d - 2.0 * a * b - a,
            linear: 2.0 * a * d,
            quadratic: a * a,
        }
    }

    /// `W² + W′`.
    pub fn partner(sp: &SuperpotentialParams) -> Self {
        let SuperpotentialParams {
            slope: a,
            pole: b,
            shift: d,
        } = *sp;
        Self {
            inverse_square: b * b + b,
            inverse: -2.0 * b * d,
            constant: d * d - 2.0 * a * b + a,
            linear: 2.0 * a * d,
            quadratic: a * a,
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        let inv = 1.0 / r;
        self.inverse_square * inv * inv
            + self.inverse * inv
            + self.constant
            + self.linear * r
            + self.quadratic * r * r
    }

    fn minus(&self, other: &Self) -> Self {
        Self {
            inverse_square: self.inverse_square - other.inverse_square,
            inverse: self.inverse - other.inverse,
            constant: self.constant - other.constant,
            linear: self.linear - other.linear,
            quadratic: self.quadratic - other.quadratic,
        }
    }
}

/// Coefficient-wise comparison of `W_k² + W_k′` against
/// `W_{k+1}² − W_{k+1}′ + R` for consecutive members.
///
/// Two constants are reported. `remainder` is `D² − 2AB + A` of the lower
/// member, and `constant_with_remainder` is the constant-channel difference
/// when that `R` is used. `scale_step` is `E_{k+1} − E_k`, the constant that
/// puts both sides on the same energy scale; `difference.constant` and
/// `max_pointwise` are computed with it, which leaves the linear channel
/// `a_k − a_{k+1}` as the only non-zero term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeInvarianceReport {
    pub lower_k: usize,
    pub upper_k: usize,
    pub difference: LaurentCoefficients,
    pub remainder: f64,
    pub constant_with_remainder: f64,
    pub scale_step: f64,
    pub max_pointwise: f64,
}

pub fn shape_invariance_report(
    lower: &HierarchyMember,
    upper: &HierarchyMember,
    grid: &[f64],
) -> Result<ShapeInvarianceReport> {
    if upper.k != lower.k + 1 {
        return Err(Error::IndexMismatch {
            lower: lower.k,
            upper: upper.k,
        });
    }
    for &r in grid {
        check_radius(r)?;
    }
    let lhs = LaurentCoefficients::partner(&lower.superpotential);
    let base = LaurentCoefficients::riccati(&upper.superpotential);
    let scale_step = upper.ground_energy - lower.ground_energy;
    let rhs = LaurentCoefficients {
        constant: base.constant + scale_step,
        ..base
    };
    let difference = lhs.minus(&rhs);
    let constant_with_remainder = lhs.constant - (base.constant + lower.remainder);
    let max_pointwise = grid
        .iter()
        .map(|&r| (lhs.value(r) - rhs.value(r)).abs())
        .fold(0.0, f64::max);
    Ok(ShapeInvarianceReport {
        lower_k: lower.k,
        upper_k: upper.k,
        difference,
        remainder: lower.remainder,
        constant_with_remainder,
        scale_step,
        max_pointwise,
    })
}

/// Flat record of a hierarchy member for CSV/JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberRecord {
    pub k: usize,
    pub a_k: f64,
    pub l_k: f64,
    pub offset: f64,
    #[serde(rename = "A")]
    pub slope: f64,
    #[serde(rename = "B")]
    pub pole: f64,
    #[serde(rename = "D")]
    pub shift: f64,
    #[serde(rename = "R")]
    pub remainder: f64,
    #[serde(rename = "E_k")]
    pub energy: f64,
}

impl From<&HierarchyMember> for MemberRecord {
    fn from(m: &HierarchyMember) -> Self {
        Self {
            k: m.k,
            a_k: m.params.a,
            l_k: m.params.l,
            offset: m.params.offset,
            slope: m.superpotential.slope,
            pole: m.superpotential.pole,
            shift: m.superpotential.shift,
            remainder: m.remainder,
            energy: m.ground_energy,
        }
    }
}

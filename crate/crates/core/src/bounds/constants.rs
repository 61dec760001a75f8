use std::fmt;
use std::str::FromStr;

use super::params::HolderParams;
use crate::error::{Error, Result};
use crate::flow::VectorFieldSet;
use crate::special::{factorial, gamma};

const MAX_BISECTIONS: usize = 200;

/// How `a_{Δ,2}` enters the interval-size equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMode {
    /// Replace `a_{Δ,2}` by its Δ-free majorant `a₂`.
    #[default]
    Majorant,
    /// Keep the Δ-dependent `a_{Δ,2}` built from `K*_Δ Δ^β`.
    Exact,
}

impl fmt::Display for DeltaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaMode::Majorant => "majorant",
            DeltaMode::Exact => "exact",
        })
    }
}

impl FromStr for DeltaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majorant" => Ok(Self::Majorant),
            "exact" => Ok(Self::Exact),
            other => Err(Error::spec(other, "expected `majorant` or `exact`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub mode: DeltaMode,
    /// Multiplier applied to `k₁`; anything but 1 is a mutation used as a
    /// negative control by the self-test.
    #[doc(hidden)]
    pub k1_scale: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            mode: DeltaMode::Majorant,
            k1_scale: 1.0,
        }
    }
}

/// Per-channel inputs and the full constant chain of the growth bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundConstants {
    pub params: HolderParams,
    pub mode: DeltaMode,
    pub dim: usize,
    pub horizon: f64,
    /// `‖B_γ‖_{β,T}`.
    pub holder_norms: Vec<f64>,
    /// `(M_γ, M⁽¹⁾_γ, M⁽²⁾_γ)`.
    pub field: Vec<(f64, f64, f64)>,
    pub k1: f64,
    pub c_alpha: f64,
    /// `M⁽¹⁾_{γ,α} = α M⁽¹⁾_γ / (1 − 2α)`.
    pub m1_alpha: Vec<f64>,
    pub m_alpha: f64,
    pub mtilde1_alpha: f64,
    /// Δ-free bound on `K*_Δ Δ^β` used by the majorant.
    pub kstar_scaled_majorant: f64,
    /// `a_{γ,1}` with the majorant substituted.
    pub a1_channel: Vec<f64>,
    pub a2: f64,
    pub b1_channel: Vec<f64>,
    pub b1: f64,
    pub b2: f64,
    pub delta0: f64,
    pub delta: f64,
    /// `a_{Δ,2}` as it enters `S` (equals `a2` in majorant mode).
    pub a_delta2: f64,
    pub k_delta: f64,
    pub kstar: f64,
    pub p: f64,
    pub s: f64,
    pub c_t: f64,
    /// All field constants vanish: `Δ = T`, `S = 1`, `C_T = 0`.
    pub degenerate: bool,
}

/// Sums `Σ_γ w_γ ‖B_γ‖`.
fn weighted(w: impl Iterator<Item = f64>, norms: &[f64]) -> f64 {
    w.zip(norms).map(|(a, b)| a * b).sum()
}

/// Build the constant chain and choose Δ.
pub fn compute_constants(
    params: HolderParams,
    fields: &VectorFieldSet,
    holder_norms: &[f64],
    horizon: f64,
    options: BoundOptions,
) -> Result<BoundConstants> {
    if !fields.is_conforming() {
        return Err(Error::domain(format!("field `{}` violates the uniform bound", fields.spec())));
    }
    let field: Vec<_> = fields.constants().iter().map(|c| (c.sup, c.lip, c.lip_jacobian)).collect();
    constants_from_parts(params, &field, fields.dim(), holder_norms, horizon, options)
}

/// [`compute_constants`] on raw `(M, M⁽¹⁾, M⁽²⁾)` triples.
pub fn constants_from_parts(
    params: HolderParams,
    field: &[(f64, f64, f64)],
    dim: usize,
    holder_norms: &[f64],
    horizon: f64,
    options: BoundOptions,
) -> Result<BoundConstants> {
    if field.len() != holder_norms.len() || field.is_empty() {
        return Err(Error::domain("need one Hölder norm per channel"));
    }
    if holder_norms.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::domain("Hölder norms must be finite and non-negative"));
    }
    if field.iter().any(|&(m, m1, m2)| !(m >= 0.0 && m1 >= 0.0 && m2 >= 0.0 && m.is_finite())) {
        return Err(Error::domain("field constants must be finite and non-negative"));
    }
    if !(horizon > 0.0) || dim == 0 {
        return Err(Error::domain("horizon and dimension must be positive"));
    }
    if !(options.k1_scale > 0.0 && options.k1_scale.is_finite()) {
        return Err(Error::domain("k1 scale must be positive"));
    }
    let (a, b) = (params.alpha(), params.beta());
    let n = dim as f64;
    let k1 = options.k1_scale * (2.0 * a + b - 1.0) / ((a + b - 1.0) * gamma(a));
    let c_alpha = 1.0 / gamma(1.0 - a);
    let m1_alpha: Vec<f64> = field.iter().map(|f| a * f.1 / (1.0 - 2.0 * a)).collect();
    let m_alpha = weighted(field.iter().map(|f| f.0), holder_norms) / (1.0 - a);
    let mtilde1_alpha = weighted(m1_alpha.iter().copied(), holder_norms) / (2.0 - 2.0 * a);

    let sum_m = weighted(field.iter().map(|f| f.0), holder_norms);
    let sum_m1 = weighted(field.iter().map(|f| f.1), holder_norms);
    let sum_m2 = weighted(field.iter().map(|f| f.2), holder_norms);
    let kstar_scaled_majorant = if sum_m2 == 0.0 {
        0.0
    } else if sum_m1 == 0.0 {
        return Err(Error::domain("Jacobian varies but the field has zero Lipschitz constant"));
    } else {
        sum_m / (a * sum_m1)
    };
    let a1_channel: Vec<f64> = field
        .iter()
        .map(|f| c_alpha * (f.1 + a * f.2 * kstar_scaled_majorant))
        .collect();
    let a2 = weighted(a1_channel.iter().copied(), holder_norms) / (1.0 - a);
    let b1_channel: Vec<f64> = field.iter().map(|f| a * f.1 * c_alpha / (b - a)).collect();
    let b1 = weighted(b1_channel.iter().copied(), holder_norms);
    let b2 = b1 / (1.0 - a + b);

    let mut c = BoundConstants {
        params,
        mode: options.mode,
        dim,
        horizon,
        holder_norms: holder_norms.to_vec(),
        field: field.to_vec(),
        k1,
        c_alpha,
        m1_alpha,
        m_alpha,
        mtilde1_alpha,
        kstar_scaled_majorant,
        a1_channel,
        a2,
        b1_channel,
        b1,
        b2,
        delta0: f64::INFINITY,
        delta: horizon,
        a_delta2: a2,
        k_delta: 0.0,
        kstar: 0.0,
        p: 1.0,
        s: 1.0,
        c_t: 0.0,
        degenerate: false,
    };
    if mtilde1_alpha == 0.0 {
        if a2 + b2 > 0.0 {
            return Err(Error::domain("degenerate constants: M̃⁽¹⁾_α = 0 but a₂ + b₂ > 0"));
        }
        c.degenerate = true;
        c.k_delta = c_alpha * n * k1 * m_alpha;
        c.kstar = c.k_delta / (1.0 - 2.0 * a);
        return Ok(c);
    }
    let sol = solve_delta(&c)?;
    c.delta0 = sol.delta0;
    c.delta = sol.delta;
    c.a_delta2 = c.a_delta2_at(sol.delta);
    let db = sol.delta.powf(b);
    c.k_delta = c_alpha * n * k1 * m_alpha / (1.0 - c_alpha * n * k1 * mtilde1_alpha * db);
    c.kstar = c.k_delta / (1.0 - 2.0 * a);
    c.s = 1.0 / (1.0 - n * k1 * c.a_delta2 * db / (1.0 - n * k1 * b2 * db));
    c.p = horizon / sol.delta;
    c.c_t = 1.0 / sol.delta;
    Ok(c)
}

/// Outcome of the interval-size solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSolution {
    pub delta0: f64,
    pub delta: f64,
    /// `Δ = Δ0` was accepted without bisection.
    pub initial_accepted: bool,
    /// `|Δ^{−β} − 3nk₁ max[c_α M̃⁽¹⁾_α, a_{Δ,2} + b₂]| / Δ^{−β}`.
    pub residual: f64,
    pub iterations: usize,
}

impl BoundConstants {
    /// `a_{Δ,2}` for the configured mode; `Δ` must not exceed `Δ0`.
    pub fn a_delta2_at(&self, delta: f64) -> f64 {
        match self.mode {
            DeltaMode::Majorant => self.a2,
            DeltaMode::Exact => {
                let (a, b) = (self.params.alpha(), self.params.beta());
                let n = self.dim as f64;
                let db = delta.powf(b);
                let q = self.c_alpha * n * self.k1;
                let kstar_scaled = q * self.m_alpha * db / ((1.0 - q * self.mtilde1_alpha * db) * (1.0 - 2.0 * a));
                let a1: f64 = self
                    .field
                    .iter()
                    .zip(&self.holder_norms)
                    .map(|(f, nb)| self.c_alpha * (f.1 + a * f.2 * kstar_scaled) * nb)
                    .sum();
                a1 / (1.0 - a)
            }
        }
    }

    /// `3nk₁ max[c_α M̃⁽¹⁾_α, a_{Δ,2} + b₂]`, the right side of the Δ equation.
    pub fn delta_rhs(&self, delta: f64) -> f64 {
        let q = 3.0 * self.dim as f64 * self.k1;
        q * (self.c_alpha * self.mtilde1_alpha).max(self.a_delta2_at(delta) + self.b2)
    }

    /// The three interval-size requirements at the chosen Δ:
    /// `Δ^{−β} > c_α n k₁ M̃⁽¹⁾_α`, `> n k₁ b₂`, `> n k₁ (a_{Δ,2} + b₂)`.
    pub fn interval_conditions(&self) -> [bool; 3] {
        if self.degenerate {
            return [true; 3];
        }
        let lhs = self.delta.powf(-self.params.beta());
        let nk = self.dim as f64 * self.k1;
        [
            lhs > self.c_alpha * nk * self.mtilde1_alpha,
            lhs > nk * self.b2,
            lhs > nk * (self.a_delta2 + self.b2),
        ]
    }

    /// `⌈p⌉`, at least 1.
    pub fn intervals(&self, horizon: f64) -> f64 {
        if self.degenerate {
            return (horizon / self.horizon).ceil().max(1.0);
        }
        (horizon / self.delta).ceil().max(1.0)
    }

    /// `(C_T)^β`, i.e. `Δ^{−β}`; zero for degenerate fields.
    pub fn c_t_pow_beta(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            self.delta.powf(-self.params.beta())
        }
    }

    /// `3n k₁ Σ_γ (c_α M̃⁽¹⁾_{α,γ} + a_{2,γ} + b_{2,γ}) ‖B_γ‖`, which dominates
    /// `(C_T)^β` pathwise.
    pub fn moment_rhs(&self) -> f64 {
        self.moment_sum(|c, mt, a2, b2| c * mt + a2 + b2)
    }

    /// The same sum with `c_α` factored out of every term, as the bound is
    /// commonly stated; not guaranteed to dominate `(C_T)^β`.
    pub fn moment_rhs_printed(&self) -> f64 {
        self.moment_sum(|c, mt, a2, b2| c * (mt + a2 + b2))
    }

    fn moment_sum(&self, term: impl Fn(f64, f64, f64, f64) -> f64) -> f64 {
        let (a, b) = (self.params.alpha(), self.params.beta());
        let q = 3.0 * self.dim as f64 * self.k1;
        (0..self.field.len())
            .map(|g| {
                let mt = self.m1_alpha[g] / (2.0 - 2.0 * a);
                let a2 = self.a1_channel[g] / (1.0 - a);
                let b2 = self.b1_channel[g] / (1.0 - a + b);
                term(self.c_alpha, mt, a2, b2) * self.holder_norms[g]
            })
            .sum::<f64>()
            * q
    }
}

/// Choose Δ: accept `Δ0` from `Δ0^{−β} = 3nk₁ c_α M̃⁽¹⁾_α` when it already
/// dominates `3nk₁(a_{Δ0,2} + b₂)`, otherwise bisect (in log Δ) on `(0, Δ0]`
/// for `Δ^{−β} = 3nk₁(a_{Δ,2} + b₂)`.
pub fn solve_delta(c: &BoundConstants) -> Result<DeltaSolution> {
    let b = c.params.beta();
    let q = 3.0 * c.dim as f64 * c.k1;
    let base = q * c.c_alpha * c.mtilde1_alpha;
    if !(base > 0.0 && base.is_finite()) {
        return Err(Error::domain("Δ0 undefined for non-positive constants"));
    }
    let delta0 = base.powf(-1.0 / b);
    let g = |ln_d: f64| {
        let d = ln_d.exp();
        (-b * ln_d).exp() - q * (c.a_delta2_at(d) + c.b2)
    };
    let residual = |d: f64| {
        let lhs = d.powf(-b);
        (lhs - c.delta_rhs(d)).abs() / lhs
    };
    let hi0 = delta0.ln();
    if g(hi0) >= 0.0 {
        return Ok(DeltaSolution {
            delta0,
            delta: delta0,
            initial_accepted: true,
            residual: residual(delta0),
            iterations: 0,
        });
    }
    let mut lo = hi0 - 1.0;
    while g(lo) < 0.0 {
        lo -= 1.0;
        if lo < hi0 - 700.0 {
            return Err(Error::NoConvergence { iterations: 0 });
        }
    }
    let mut hi = hi0;
    let mut it = 0;
    while it < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    let delta = lo.exp();
    let res = residual(delta);
    if res >= 1e-10 {
        return Err(Error::NoConvergence { iterations: it });
    }
    Ok(DeltaSolution {
        delta0,
        delta,
        initial_accepted: false,
        residual: res,
        iterations: it,
    })
}

/// A growth bound carried in log₂ since `S^{⌈p⌉}` overflows easily.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    /// `log₂` of the interval-product bound (`S^{⌈p⌉}` form).
    pub log2: f64,
    /// `log₂` of the closed form (`2^{C_T T}` form).
    pub log2_closed_form: f64,
    pub intervals: f64,
}

impl GrowthBound {
    /// The bound itself; `inf` when it exceeds the double range.
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }
}

/// `sup_t ‖v_t‖₁ ≤ S^{⌈p⌉} ‖v‖₁ ≤ 2^{C_T T} ‖v‖₁` (up to the ceiling).
pub fn tangent_growth_bound(c: &BoundConstants, horizon: f64, v0_l1: f64) -> Result<GrowthBound> {
    if !(horizon > 0.0) || !(v0_l1 > 0.0) {
        return Err(Error::domain("horizon and initial norm must be positive"));
    }
    let k = c.intervals(horizon);
    Ok(GrowthBound {
        log2: k * c.s.log2() + v0_l1.log2(),
        log2_closed_form: c.c_t * horizon + v0_l1.log2(),
        intervals: k,
    })
}

/// `sup_t H_m(M_t) ≤ m! (√n S^{⌈p⌉})^m H_m(M)`.
pub fn hausdorff_growth_bound(
    c: &BoundConstants,
    horizon: f64,
    m: usize,
    initial_measure: f64,
    n: usize,
) -> Result<GrowthBound> {
    if m == 0 || m >= n {
        return Err(Error::domain(format!("need 1 <= m < n, got m = {m}, n = {n}")));
    }
    if !(initial_measure > 0.0) {
        return Err(Error::domain("initial measure must be positive"));
    }
    let t = tangent_growth_bound(c, horizon, 1.0)?;
    let mf = m as f64;
    let prefactor = factorial(m).log2() + 0.5 * mf * (n as f64).log2() + initial_measure.log2();
    Ok(GrowthBound {
        log2: prefactor + mf * t.log2,
        log2_closed_form: prefactor + mf * t.log2_closed_form,
        intervals: t.intervals,
    })
}

//! Closed-form lower bounds for the first Dirichlet eigenvalue.
//!
//! Everything here is a pure function of its arguments. The comparison
//! functions [`mu0`] and [`mu1`] feed the Laplacian comparison range and the
//! divergence floor of `grad(rho o phi)`; the eigenvalue bounds are all of the
//! form `(floor / (2 sup|X|))^2`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign and magnitude of a sectional-curvature bound: `-k^2`, `0` or `k^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", content = "k")]
pub enum CurvatureBound {
    Negative(f64),
    Zero,
    Positive(f64),
}

impl CurvatureBound {
    pub fn negative(k: f64) -> Result<Self> {
        check_magnitude(k)?;
        Ok(CurvatureBound::Negative(k))
    }

    pub fn positive(k: f64) -> Result<Self> {
        check_magnitude(k)?;
        Ok(CurvatureBound::Positive(k))
    }

    /// Classifies a sectional curvature value. Exact zero is the flat regime.
    pub fn from_sectional(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "curvature bound must be finite, got {kappa}"
            )));
        }
        Ok(if kappa > 0.0 {
            CurvatureBound::Positive(kappa.sqrt())
        } else if kappa < 0.0 {
            CurvatureBound::Negative((-kappa).sqrt())
        } else {
            CurvatureBound::Zero
        })
    }

    /// The sectional curvature this bound stands for.
    pub fn sectional(&self) -> f64 {
        match *self {
            CurvatureBound::Negative(k) => -k * k,
            CurvatureBound::Zero => 0.0,
            CurvatureBound::Positive(k) => k * k,
        }
    }

    pub fn magnitude(&self) -> Option<f64> {
        match *self {
            CurvatureBound::Negative(k) | CurvatureBound::Positive(k) => Some(k),
            CurvatureBound::Zero => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CurvatureBound::Negative(k) | CurvatureBound::Positive(k) => check_magnitude(k),
            CurvatureBound::Zero => Ok(()),
        }
    }

    /// Largest radius on which the comparison functions are defined.
    pub fn comparison_limit(&self) -> f64 {
        match *self {
            CurvatureBound::Positive(k) => FRAC_PI_2 / k,
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for CurvatureBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureBound::Negative(k) => write!(f, "K = -{k}^2"),
            CurvatureBound::Zero => write!(f, "K = 0"),
            CurvatureBound::Positive(k) => write!(f, "K = {k}^2"),
        }
    }
}

fn check_magnitude(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "curvature magnitude must be positive and finite, got {k}"
        )))
    }
}

fn comparison(rho: f64, curv: CurvatureBound, name: &str) -> Result<f64> {
    curv.validate()?;
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!("{name}: rho must be positive, got {rho}")));
    }
    let value = match curv {
        CurvatureBound::Negative(k) => k / (k * rho).tanh(),
        CurvatureBound::Zero => 1.0 / rho,
        CurvatureBound::Positive(k) => {
            if rho >= FRAC_PI_2 / k {
                return Err(Error::Domain(format!(
                    "{name}: rho = {rho} is not below pi/(2k) = {}",
                    FRAC_PI_2 / k
                )));
            }
            k / (k * rho).tan()
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{name}: evaluation at rho = {rho} overflows")))
    }
}

/// Comparison function built from a lower curvature bound: `k coth(k rho)`,
/// `1/rho` or `k cot(k rho)`.
pub fn mu0(rho: f64, inf_curv: CurvatureBound) -> Result<f64> {
    comparison(rho, inf_curv, "mu0")
}

/// Comparison function built from an upper curvature bound. Same formula
/// family as [`mu0`]; it bounds `Hess rho` from below.
pub fn mu1(rho: f64, sup_curv: CurvatureBound) -> Result<f64> {
    comparison(rho, sup_curv, "mu1")
}

/// Closed interval of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Guaranteed range `[(n-1) mu1, (n-1) mu0]` for the Laplacian of the distance
/// function in an `n`-manifold with the given curvature bounds.
pub fn laplacian_comparison_range(
    n: usize,
    rho: f64,
    inf_curv: CurvatureBound,
    sup_curv: CurvatureBound,
) -> Result<Interval> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {n}")));
    }
    let factor = (n - 1) as f64;
    let lower = factor * mu1(rho, sup_curv)?;
    let upper = factor * mu0(rho, inf_curv)?;
    if lower > upper {
        return Err(Error::InvalidArgument(format!(
            "inverted comparison interval [{lower}, {upper}]: upper curvature bound {sup_curv} lies below lower bound {inf_curv}"
        )));
    }
    Ok(Interval { lower, upper })
}

/// Which closed-form estimate produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "I.1")]
    I1,
    #[serde(rename = "I.2")]
    I2,
    #[serde(rename = "I.3a")]
    I3a,
    #[serde(rename = "I.3b")]
    I3b,
    #[serde(rename = "II.4")]
    II4,
    #[serde(rename = "II.5/I.2")]
    II5Flat,
    #[serde(rename = "II.5/I.3a")]
    II5Uniform,
    #[serde(rename = "II.5/I.3b")]
    II5Coth,
    MainLemma,
    McKean,
    CheungLeung,
    Hadamard,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::I1 => "I.1",
            CaseTag::I2 => "I.2",
            CaseTag::I3a => "I.3a",
            CaseTag::I3b => "I.3b",
            CaseTag::II4 => "II.4",
            CaseTag::II5Flat => "II.5/I.2",
            CaseTag::II5Uniform => "II.5/I.3a",
            CaseTag::II5Coth => "II.5/I.3b",
            CaseTag::MainLemma => "MainLemma",
            CaseTag::McKean => "McKean",
            CaseTag::CheungLeung => "CheungLeung",
            CaseTag::Hadamard => "Hadamard",
        }
    }

    /// The divergence-floor formula this case uses.
    pub fn form(&self) -> Option<BulletForm> {
        match self {
            CaseTag::I1 | CaseTag::II4 => Some(BulletForm::Cot),
            CaseTag::I2 | CaseTag::II5Flat => Some(BulletForm::Reciprocal),
            CaseTag::I3a | CaseTag::II5Uniform => Some(BulletForm::Uniform),
            CaseTag::I3b | CaseTag::II5Coth => Some(BulletForm::Coth),
            _ => None,
        }
    }

    fn for_form(form: BulletForm, finite_inj: bool) -> Self {
        match (form, finite_inj) {
            (BulletForm::Cot, true) => CaseTag::I1,
            (BulletForm::Cot, false) => CaseTag::II4,
            (BulletForm::Reciprocal, true) => CaseTag::I2,
            (BulletForm::Reciprocal, false) => CaseTag::II5Flat,
            (BulletForm::Uniform, true) => CaseTag::I3a,
            (BulletForm::Uniform, false) => CaseTag::II5Uniform,
            (BulletForm::Coth, true) => CaseTag::I3b,
            (BulletForm::Coth, false) => CaseTag::II5Coth,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The four divergence floors of the ball theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BulletForm {
    /// `(m-1) k cot(k r) - h`
    Cot,
    /// `(m-1)/r - h`
    Reciprocal,
    /// `(m-1) k - h`, radius independent
    Uniform,
    /// `(m-1) k coth(k r) - h`
    Coth,
}

/// Parameters actually fed into a bound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputsEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureBound>,
    /// `h(p, r)` at the radius used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// `h` at the scale where the radius was selected (`inj(p)` in Case I).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_selection: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inf_div: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
}

/// A lower bound for `lambda_1` together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueBound {
    pub value: f64,
    pub case_tag: CaseTag,
    pub radius_used: Option<f64>,
    pub inputs_echo: InputsEcho,
}

fn check_dimension(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::InvalidArgument(format!("m must be >= 2, got {m}")))
    } else {
        Ok(())
    }
}

/// `[inf div X / (2 sup |X|)]^2` for a vector field with positive divergence.
pub fn main_lemma_bound(inf_div: f64, sup_norm: f64) -> Result<EigenvalueBound> {
    if !(inf_div > 0.0) || !inf_div.is_finite() {
        return Err(Error::HypothesisViolation(format!(
            "inf div X must be positive, got {inf_div}"
        )));
    }
    if !(sup_norm > 0.0) || !sup_norm.is_finite() {
        return Err(Error::HypothesisViolation(format!(
            "sup |X| must be positive and finite, got {sup_norm}"
        )));
    }
    let q = inf_div / (2.0 * sup_norm);
    Ok(EigenvalueBound {
        value: q * q,
        case_tag: CaseTag::MainLemma,
        radius_used: None,
        inputs_echo: InputsEcho {
            inf_div: Some(inf_div),
            sup_norm: Some(sup_norm),
            ..Default::default()
        },
    })
}

/// `(m-1)^2 a^2 / 4` for simply connected manifolds with `K <= -a^2`.
pub fn mckean_bound(m: usize, a: f64) -> Result<EigenvalueBound> {
    check_dimension(m)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    // Same expression as `hadamard_bound` with beta = 0 so the two agree bitwise.
    let s = (m - 1) as f64 * a;
    Ok(EigenvalueBound {
        value: s * s / 4.0,
        case_tag: CaseTag::McKean,
        radius_used: None,
        inputs_echo: InputsEcho {
            m: Some(m),
            a: Some(a),
            ..Default::default()
        },
    })
}

/// `(m-1-c)^2 / 4` for submanifolds of `H^n(-1)` with `|H| <= c < m-1`.
pub fn cheung_leung_bound(m: usize, c: f64) -> Result<EigenvalueBound> {
    check_dimension(m)?;
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidArgument(format!("c must be nonnegative, got {c}")));
    }
    let gap = (m - 1) as f64 - c;
    if !(gap > 0.0) {
        return Err(Error::HypothesisViolation(format!("c must be < m-1 = {}", m - 1)));
    }
    Ok(EigenvalueBound {
        value: gap * gap / 4.0,
        case_tag: CaseTag::CheungLeung,
        radius_used: None,
        inputs_echo: InputsEcho {
            m: Some(m),
            c: Some(c),
            ..Default::default()
        },
    })
}

/// `((m-1) a - beta)^2 / 4` for submanifolds of Hadamard manifolds with
/// `K <= -a^2` and `|H| <= beta < (m-1) a`.
pub fn hadamard_bound(m: usize, a: f64, beta: f64) -> Result<EigenvalueBound> {
    check_dimension(m)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be nonnegative, got {beta}")));
    }
    let s = (m - 1) as f64 * a;
    if !(beta < s) {
        return Err(Error::HypothesisViolation(format!(
            "beta must be < (m-1)*a = {s}, got {beta}"
        )));
    }
    let gap = s - beta;
    Ok(EigenvalueBound {
        value: gap * gap / 4.0,
        case_tag: CaseTag::Hadamard,
        radius_used: None,
        inputs_echo: InputsEcho {
            m: Some(m),
            a: Some(a),
            beta: Some(beta),
            ..Default::default()
        },
    })
}

/// `(m-1) mu1(r) - h`: lower bound for `div grad(rho o phi)` on a component of
/// the preimage of a ball of radius `r`.
pub fn div_lower_bound(m: usize, ambient_sup_curv: CurvatureBound, r: f64, h: f64) -> Result<f64> {
    check_dimension(m)?;
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::InvalidArgument(format!("h must be nonnegative, got {h}")));
    }
    Ok((m - 1) as f64 * mu1(r, ambient_sup_curv)? - h)
}

/// A radial profile `r -> value` (a supremum over `B_N(p, r)`).
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Local data at the ball center `p`.
#[derive(Clone)]
pub struct BallContext {
    pub m: usize,
    pub ambient_dim: usize,
    /// Injectivity radius at `p`; `f64::INFINITY` for a pole.
    pub inj: f64,
    kappa: Profile,
    h: Profile,
    /// Upper end of the scan interval used in Case II.
    pub s_max: f64,
}

impl fmt::Debug for BallContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BallContext")
            .field("m", &self.m)
            .field("ambient_dim", &self.ambient_dim)
            .field("inj", &self.inj)
            .field("s_max", &self.s_max)
            .finish_non_exhaustive()
    }
}

pub const DEFAULT_SCAN_LIMIT: f64 = 1e3;
const SCAN_REL_TOL: f64 = 1e-6;

impl BallContext {
    pub fn new<K, H>(m: usize, ambient_dim: usize, inj: f64, kappa: K, h: H) -> Result<Self>
    where
        K: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_dimension(m)?;
        if ambient_dim <= m {
            return Err(Error::InvalidArgument(format!(
                "ambient dimension {ambient_dim} must exceed m = {m}"
            )));
        }
        if !(inj > 0.0) {
            return Err(Error::InvalidArgument(format!("inj must be positive, got {inj}")));
        }
        let ctx = BallContext {
            m,
            ambient_dim,
            inj,
            kappa: Arc::new(kappa),
            h: Arc::new(h),
            s_max: DEFAULT_SCAN_LIMIT,
        };
        ctx.check_profiles()?;
        Ok(ctx)
    }

    /// Context with radius-independent `kappa` and `h`.
    pub fn constant(m: usize, ambient_dim: usize, inj: f64, kappa: f64, h: f64) -> Result<Self> {
        Self::new(m, ambient_dim, inj, move |_| kappa, move |_| h)
    }

    pub fn with_scan_limit(mut self, s_max: f64) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::InvalidArgument(format!("scan limit must be positive, got {s_max}")));
        }
        self.s_max = s_max;
        Ok(self)
    }

    /// `kappa(p, r)`, the supremum of sectional curvatures on `B_N(p, r)`.
    pub fn kappa(&self, r: f64) -> f64 {
        (self.kappa)(r)
    }

    /// `h(p, r)`, the supremum of `|H|` over the immersed points in `B_N(p, r)`.
    pub fn h(&self, r: f64) -> f64 {
        (self.h)(r)
    }

    fn check_profiles(&self) -> Result<()> {
        let top = self.inj.min(self.s_max);
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=64 {
            let r = top * 10f64.powf(-9.0 * (1.0 - i as f64 / 64.0));
            let (k, h) = (self.kappa(r), self.h(r));
            if !k.is_finite() || !h.is_finite() || h < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "profiles must be finite with h >= 0 (at r = {r}: kappa = {k}, h = {h})"
                )));
            }
            if let Some((pk, ph)) = prev {
                if k < pk || h < ph {
                    return Err(Error::InvalidArgument(format!(
                        "kappa and h must be nondecreasing in r (violated at r = {r})"
                    )));
                }
            }
            prev = Some((k, h));
        }
        Ok(())
    }
}

/// Result of the radius selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRadius {
    /// Supremum of admissible radii; `f64::INFINITY` when every radius works.
    pub radius: f64,
    pub case_tag: CaseTag,
    /// Radius at which `kappa` and `h` were read.
    pub scale: f64,
    pub kappa: f64,
    pub h: f64,
}

fn acot(x: f64) -> f64 {
    // Range (0, pi), so acot(0) = pi/2.
    1f64.atan2(x)
}

fn acoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

/// Largest radius for which the divergence floor stays positive when `kappa`
/// and `h` are frozen at the given values.
fn frozen_root(m: usize, kappa: f64, h: f64) -> Result<(f64, BulletForm)> {
    let dim = (m - 1) as f64;
    Ok(match CurvatureBound::from_sectional(kappa)? {
        CurvatureBound::Positive(k) => {
            let r = (FRAC_PI_2 / k).min(acot(h / (dim * k)) / k);
            (r, BulletForm::Cot)
        }
        CurvatureBound::Zero => {
            let r = if h > 0.0 { dim / h } else { f64::INFINITY };
            (r, BulletForm::Reciprocal)
        }
        CurvatureBound::Negative(k) => {
            let q = h / (dim * k);
            if q < 1.0 {
                (f64::INFINITY, BulletForm::Uniform)
            } else if q == 1.0 {
                (f64::INFINITY, BulletForm::Coth)
            } else {
                (acoth(q) / k, BulletForm::Coth)
            }
        }
    })
}

/// Supremum of the radii the ball theorem admits at `p`.
///
/// Case I (`inj` finite) reads `kappa` and `h` at `inj`. Case II reads them at
/// the scan limit when `kappa` stays nonpositive there (II.5), and otherwise
/// maximizes `min{s, R(s)}` over `s in (0, s_max]` (II.4), where `R(s)` is
/// the root of the divergence floor with the profiles frozen at scale `s`.
pub fn admissible_radius(ctx: &BallContext) -> Result<AdmissibleRadius> {
    let finite_inj = ctx.inj.is_finite();
    let result = if finite_inj || ctx.kappa(ctx.s_max) <= 0.0 {
        let scale = if finite_inj { ctx.inj } else { ctx.s_max };
        let (kappa, h) = (ctx.kappa(scale), ctx.h(scale));
        let (root, form) = frozen_root(ctx.m, kappa, h)?;
        AdmissibleRadius {
            radius: root.min(ctx.inj),
            case_tag: CaseTag::for_form(form, finite_inj),
            scale,
            kappa,
            h,
        }
    } else {
        let (s, radius) = scan_case_four(ctx)?;
        AdmissibleRadius {
            radius,
            case_tag: CaseTag::II4,
            scale: s,
            kappa: ctx.kappa(s),
            h: ctx.h(s),
        }
    };
    if !(result.radius > 0.0) || !result.h.is_finite() {
        return Err(Error::NoAdmissibleRadius(format!(
            "selection set is empty (kappa = {}, h = {})",
            result.kappa, result.h
        )));
    }
    Ok(result)
}

fn scan_case_four(ctx: &BallContext) -> Result<(f64, f64)> {
    let objective = |log_s: f64| -> Result<f64> {
        let s = log_s.exp();
        let (root, _) = frozen_root(ctx.m, ctx.kappa(s), ctx.h(s))?;
        Ok(s.min(root))
    };
    let hi = ctx.s_max.ln();
    let lo = hi - 12.0 * std::f64::consts::LN_10;
    const GRID: usize = 2000;
    let step = (hi - lo) / GRID as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..=GRID {
        let t = lo + step * i as f64;
        let v = objective(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    // The objective is unimodal: the minimum of an increasing and a
    // nonincreasing function of s.
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    while (b - a) > SCAN_REL_TOL * 1e-3 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(best.0, best.1), (mid, objective(mid)?), (c, fc), (d, fd)];
    let (t, v) = candidates
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Ok((t.exp(), v))
}

/// Divergence floor of `grad(rho o phi)` on a component inside `B_N(p, r)`,
/// with the bullet chosen from the curvature regime of `kappa(p, r)`.
///
/// Returns the floor, the case tag, the regime used and `h(p, r)`.
pub fn bullet_divergence_floor(
    ctx: &BallContext,
    r: f64,
) -> Result<(f64, CaseTag, CurvatureBound, f64)> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("r must be positive and finite, got {r}")));
    }
    let (kappa, h) = (ctx.kappa(r), ctx.h(r));
    let regime = CurvatureBound::from_sectional(kappa)?;
    let dim = (ctx.m - 1) as f64;
    let form = match regime {
        CurvatureBound::Positive(_) => BulletForm::Cot,
        CurvatureBound::Zero => BulletForm::Reciprocal,
        CurvatureBound::Negative(k) if h < dim * k => BulletForm::Uniform,
        CurvatureBound::Negative(_) => BulletForm::Coth,
    };
    let floor = match form {
        // r -> infinity limit of the coth floor; coth > 1 makes it valid at every r.
        BulletForm::Uniform => dim * regime.magnitude().unwrap_or(0.0) - h,
        _ => div_lower_bound(ctx.m, regime, r, h)?,
    };
    Ok((floor, CaseTag::for_form(form, ctx.inj.is_finite()), regime, h))
}

/// Lower bound for `lambda_1` of any component of `phi^{-1}(closed B_N(p, r))`.
pub fn ball_eigenvalue_bound(ctx: &BallContext, r: f64) -> Result<EigenvalueBound> {
    let admissible = admissible_radius(ctx)?;
    if !(r > 0.0 && r < admissible.radius) {
        return Err(Error::InadmissibleRadius {
            radius: r,
            supremum: admissible.radius,
        });
    }
    let (floor, case_tag, regime, h) = bullet_divergence_floor(ctx, r)?;
    if !(floor > 0.0) {
        return Err(Error::InadmissibleRadius {
            radius: r,
            supremum: admissible.radius,
        });
    }
    // |grad(rho o phi)| <= 1, so the Main Lemma applies with sup|X| = 1.
    let lemma = main_lemma_bound(floor, 1.0)?;
    Ok(EigenvalueBound {
        value: lemma.value,
        case_tag,
        radius_used: Some(r),
        inputs_echo: InputsEcho {
            m: Some(ctx.m),
            curvature: Some(regime),
            h: Some(h),
            h_selection: Some(admissible.h),
            r: Some(r),
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const COTH_2: f64 = 1.037_314_720_727_548_1;
    const COTH_1: f64 = 1.313_035_285_499_331_3;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn mu0_examples() {
        assert_eq!(mu0(1.0, CurvatureBound::Zero).unwrap(), 1.0);
        let v = mu0(PI / 4.0, CurvatureBound::Positive(1.0)).unwrap();
        assert!(close(v, 1.0, 1e-15));
        let v = mu0(2.0, CurvatureBound::Negative(1.0)).unwrap();
        assert!(close(v, COTH_2, 1e-15));
    }

    #[test]
    fn mu1_examples() {
        assert_eq!(mu1(0.5, CurvatureBound::Zero).unwrap(), 2.0);
        for rho in [0.1, 1.0, 10.0] {
            assert!(mu1(rho, CurvatureBound::Negative(1.0)).unwrap() > 1.0 || rho >= 10.0);
        }
        assert!(mu1(1.0, CurvatureBound::Negative(1.0)).unwrap() > 1.0);
        assert!(matches!(
            mu1(1.0, CurvatureBound::Positive(2.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn comparison_rejects_bad_rho() {
        for rho in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(mu0(rho, CurvatureBound::Zero), Err(Error::Domain(_))));
        }
        // Exactly at the cap.
        assert!(mu0(FRAC_PI_2, CurvatureBound::Positive(1.0)).is_err());
        // Overflow near the pole is rejected instead of returned.
        assert!(mu0(1e-320, CurvatureBound::Zero).is_err());
        assert!(CurvatureBound::negative(0.0).is_err());
        assert!(mu0(1.0, CurvatureBound::Positive(-1.0)).is_err());
    }

    #[test]
    fn comparison_functions_strictly_decrease() {
        let regimes = [
            CurvatureBound::Negative(1.5),
            CurvatureBound::Zero,
            CurvatureBound::Positive(0.7),
        ];
        for c in regimes {
            let top = match c {
                CurvatureBound::Negative(k) => 10.0 / k,
                _ => c.comparison_limit().min(20.0),
            };
            let pts: Vec<f64> = (1..=200).map(|i| top * i as f64 / 201.0).collect();
            for w in pts.windows(2) {
                assert!(mu0(w[0], c).unwrap() > mu0(w[1], c).unwrap(), "{c} at {}", w[0]);
                assert!(mu1(w[0], c).unwrap() > mu1(w[1], c).unwrap());
            }
        }
    }

    #[test]
    fn negative_regime_asymptote() {
        let v = mu1(50.0, CurvatureBound::Negative(1.0)).unwrap();
        assert!((v - 1.0).abs() <= 1e-10);
        for rho in [0.1, 1.0, 10.0] {
            assert!(mu1(rho, CurvatureBound::Negative(1.0)).unwrap() >= 1.0);
        }
    }

    #[test]
    fn small_radius_consistency_of_branches() {
        let rho = 1e-6;
        for c in [
            CurvatureBound::Negative(1.0),
            CurvatureBound::Zero,
            CurvatureBound::Positive(1.0),
        ] {
            let v = rho * mu0(rho, c).unwrap();
            assert!((v - 1.0).abs() <= 1e-6, "{c}: {v}");
        }
    }

    #[test]
    fn laplacian_range_examples() {
        let z = CurvatureBound::Zero;
        assert_eq!(
            laplacian_comparison_range(2, 1.0, z, z).unwrap(),
            Interval { lower: 1.0, upper: 1.0 }
        );
        let iv = laplacian_comparison_range(
            3,
            1.0,
            CurvatureBound::Negative(2.0),
            CurvatureBound::Negative(1.0),
        )
        .unwrap();
        assert!(close(iv.lower, 2.0 * COTH_1, 1e-15));
        assert!(close(iv.upper, 4.0 * COTH_2, 1e-15));
        let p = CurvatureBound::Positive(1.0);
        let iv = laplacian_comparison_range(2, PI / 6.0, p, p).unwrap();
        assert!(close(iv.lower, 3f64.sqrt(), 1e-14) && iv.lower == iv.upper);
        // Upper curvature bound below the lower one.
        assert!(laplacian_comparison_range(
            3,
            1.0,
            CurvatureBound::Negative(1.0),
            CurvatureBound::Negative(2.0)
        )
        .is_err());
    }

    #[test]
    fn main_lemma_examples() {
        assert_eq!(main_lemma_bound(2.0, 1.0).unwrap().value, 1.0);
        assert_eq!(main_lemma_bound(1.0, 1.0).unwrap().value, 0.25);
        assert!(matches!(
            main_lemma_bound(0.0, 1.0),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(matches!(
            main_lemma_bound(1.0, f64::INFINITY),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn mckean_and_cheung_leung_examples() {
        assert_eq!(mckean_bound(2, 1.0).unwrap().value, 0.25);
        assert_eq!(mckean_bound(3, 2.0).unwrap().value, 4.0);
        assert!(mckean_bound(2, 1e-9).unwrap().value < 1e-17);
        assert!(mckean_bound(2, 0.0).is_err());
        assert!(mckean_bound(1, 1.0).is_err());

        assert_eq!(cheung_leung_bound(2, 0.0).unwrap().value, 0.25);
        assert_eq!(cheung_leung_bound(3, 1.0).unwrap().value, 0.25);
        assert!(matches!(
            cheung_leung_bound(2, 1.0),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(hadamard_bound(2, 1.0, 0.0).unwrap().value, 0.25);
        let beta = 2.0 * 0.4f64.tanh();
        let v = hadamard_bound(2, 1.0, beta).unwrap().value;
        assert!(close(v, 0.014_412_251_663_597_42, 1e-12), "{v}");
        let err = hadamard_bound(2, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation(ref s) if s.contains("(m-1)*a")));
    }

    #[test]
    fn div_lower_bound_examples() {
        let v = div_lower_bound(2, CurvatureBound::Positive(1.0), PI / 4.0, 0.0).unwrap();
        assert!(close(v, 1.0, 1e-15));
        let v = div_lower_bound(2, CurvatureBound::Negative(1.0), 60.0, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(div_lower_bound(2, CurvatureBound::Zero, 0.5, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn admissible_radius_examples() {
        let ctx = BallContext::constant(2, 3, f64::INFINITY, -1.0, 0.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!(a.radius, f64::INFINITY);
        assert_eq!(a.case_tag, CaseTag::II5Uniform);

        let ctx = BallContext::constant(2, 3, f64::INFINITY, 0.0, 4.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!(a.radius, 0.25);
        assert_eq!(a.case_tag, CaseTag::II5Flat);

        let ctx = BallContext::constant(2, 3, 1.0, 1.0, 0.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!(a.radius, 1.0);
        assert_eq!(a.case_tag, CaseTag::I1);
    }

    #[test]
    fn admissible_radius_case_one_caps() {
        // pi/2 < inj: the cot root is the binding constraint.
        let ctx = BallContext::constant(3, 4, 10.0, 4.0, 2.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        let expected = (1f64).atan2(2.0 / (2.0 * 2.0)) / 2.0;
        assert!(close(a.radius, expected, 1e-15));
        assert_eq!(a.case_tag, CaseTag::I1);
    }

    #[test]
    fn admissible_radius_negative_with_large_h() {
        // q = h/((m-1)k) = 2 > 1: coth cap.
        let ctx = BallContext::constant(2, 3, f64::INFINITY, -1.0, 2.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!(a.case_tag, CaseTag::II5Coth);
        assert!(close(a.radius, 0.5 * 3f64.ln(), 1e-15));
        // Finite injectivity radius below the cap.
        let ctx = BallContext::constant(2, 3, 0.1, -1.0, 2.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!((a.radius, a.case_tag), (0.1, CaseTag::I3b));
        // k > 1 sliver m-1 <= h < (m-1)k: every radius below inj.
        let ctx = BallContext::constant(2, 3, 5.0, -4.0, 1.5).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!((a.radius, a.case_tag), (5.0, CaseTag::I3a));
    }

    #[test]
    fn case_four_scan_finds_crossing() {
        // kappa(s) = s^2, h = 0: maximize min{s, pi/(2s)} -> s = sqrt(pi/2).
        let ctx = BallContext::new(2, 3, f64::INFINITY, |s| s * s, |_| 0.0).unwrap();
        let a = admissible_radius(&ctx).unwrap();
        assert_eq!(a.case_tag, CaseTag::II4);
        assert!(close(a.radius, FRAC_PI_2.sqrt(), 1e-6), "{}", a.radius);
        let b = ball_eigenvalue_bound(&ctx, 1.0).unwrap();
        assert_eq!(b.case_tag, CaseTag::II4);
        let expected = (1.0f64 / 1.0f64.tan()).powi(2) / 4.0;
        assert!(close(b.value, expected, 1e-14));
    }

    #[test]
    fn no_admissible_radius_for_infinite_h() {
        let ctx = BallContext::constant(2, 3, 1.0, 1.0, 0.0).unwrap();
        assert!(admissible_radius(&ctx).is_ok());
        assert!(BallContext::constant(2, 3, 1.0, 1.0, f64::INFINITY).is_err());
        let ctx = BallContext::new(2, 3, f64::INFINITY, |s| s, |s| 1e300 * s * s).unwrap();
        let a = admissible_radius(&ctx);
        assert!(a.is_ok() || matches!(a, Err(Error::NoAdmissibleRadius(_))));
    }

    #[test]
    fn context_validation() {
        assert!(BallContext::constant(2, 2, 1.0, 0.0, 0.0).is_err());
        assert!(BallContext::constant(2, 3, 0.0, 0.0, 0.0).is_err());
        assert!(BallContext::new(2, 3, 1.0, |s| -s, |_| 0.0).is_err());
        assert!(BallContext::new(2, 3, 1.0, |_| 0.0, |_| -1.0).is_err());
    }

    #[test]
    fn ball_bound_examples() {
        let ctx = BallContext::constant(2, 3, f64::INFINITY, 0.0, 1.0).unwrap();
        let b = ball_eigenvalue_bound(&ctx, 0.5).unwrap();
        assert_eq!(b.value, 0.25);
        assert_eq!(b.case_tag, CaseTag::II5Flat);

        let ctx = BallContext::constant(2, 3, f64::INFINITY, -1.0, 0.0).unwrap();
        for r in [0.1, 1.0, 6.0, 1e3] {
            let b = ball_eigenvalue_bound(&ctx, r).unwrap();
            assert_eq!(b.value, 0.25);
            assert_eq!(b.case_tag, CaseTag::II5Uniform);
        }

        let ctx = BallContext::constant(2, 3, PI, 1.0, 0.0).unwrap();
        let b = ball_eigenvalue_bound(&ctx, PI / 4.0).unwrap();
        assert!(close(b.value, 0.25, 1e-15));
        assert_eq!(b.case_tag, CaseTag::I1);
        assert_eq!(b.inputs_echo.r, Some(PI / 4.0));
    }

    #[test]
    fn ball_bound_rejects_inadmissible_radius() {
        let ctx = BallContext::constant(2, 3, f64::INFINITY, 0.0, 1.0).unwrap();
        assert!(matches!(
            ball_eigenvalue_bound(&ctx, 1.0),
            Err(Error::InadmissibleRadius { .. })
        ));
        assert!(ball_eigenvalue_bound(&ctx, 0.0).is_err());
    }

    #[test]
    fn hadamard_matches_uniform_ball_bound() {
        // Corollary regime: the ball bound no longer depends on r.
        let beta = 2.0 * 0.4f64.tanh();
        let ctx = BallContext::constant(2, 3, f64::INFINITY, -1.0, beta).unwrap();
        let had = hadamard_bound(2, 1.0, beta).unwrap().value;
        for r in [1.0, 4.0, 50.0] {
            assert_eq!(ball_eigenvalue_bound(&ctx, r).unwrap().value, had);
        }
    }

    #[test]
    fn case_tags_serialize_as_labels() {
        let s = serde_json::to_string(&CaseTag::II5Uniform).unwrap();
        assert_eq!(s, "\"II.5/I.3a\"");
        let back: CaseTag = serde_json::from_str(&s).unwrap();
        assert_eq!(back, CaseTag::II5Uniform);
        assert_eq!(CaseTag::I3b.to_string(), "I.3b");
    }

    fn regime_strategy() -> impl Strategy<Value = f64> {
        prop_oneof![(-9.0f64..-0.01), Just(0.0), (0.01f64..9.0)]
    }

    proptest! {
        #[test]
        fn hadamard_with_zero_beta_is_mckean(m in 2usize..12, a in 1e-3f64..1e3) {
            prop_assert_eq!(hadamard_bound(m, a, 0.0).unwrap().value, mckean_bound(m, a).unwrap().value);
        }

        #[test]
        fn ball_bound_decreases_in_h(
            m in 2usize..6, kappa in regime_strategy(), h in 0.0f64..2.0, dh in 1e-3f64..0.5, frac in 0.05f64..0.95,
        ) {
            let lo = BallContext::constant(m, m + 1, f64::INFINITY, kappa, h).unwrap();
            let hi = BallContext::constant(m, m + 1, f64::INFINITY, kappa, h + dh).unwrap();
            let cap = admissible_radius(&hi).unwrap().radius;
            let r = if cap.is_finite() { cap * frac } else { 10.0 * frac };
            let (b_lo, b_hi) = (ball_eigenvalue_bound(&lo, r).unwrap(), ball_eigenvalue_bound(&hi, r).unwrap());
            // Monotonicity holds within one bullet; the uniform and coth floors differ at the switch.
            prop_assume!(b_lo.case_tag == b_hi.case_tag);
            prop_assert!(b_lo.value > b_hi.value);
        }

        #[test]
        fn ball_bound_decreases_in_r_for_cot_and_reciprocal(
            m in 2usize..6, kappa in prop_oneof![Just(0.0), (0.01f64..9.0)], h in 0.0f64..2.0,
            f1 in 0.05f64..0.9, df in 0.01f64..0.09,
        ) {
            let ctx = BallContext::constant(m, m + 1, f64::INFINITY, kappa, h).unwrap();
            let cap = admissible_radius(&ctx).unwrap().radius;
            let cap = if cap.is_finite() { cap } else { 10.0 };
            let a = ball_eigenvalue_bound(&ctx, cap * f1).unwrap().value;
            let b = ball_eigenvalue_bound(&ctx, cap * (f1 + df)).unwrap().value;
            prop_assert!(a > b);
        }
    }
}

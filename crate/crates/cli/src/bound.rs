use clap::{Args, ValueEnum};
use serde_json::json;

use eigenbound::bounds::{
    admissible_radius, ball_eigenvalue_bound, bullet_divergence_floor, cheung_leung_bound, div_lower_bound,
    hadamard_bound, main_lemma_bound, mckean_bound, mu0, mu1, BallContext, CurvatureBound, EigenvalueBound,
};
use eigenbound::{Error, Result};

use crate::config::{BoundDefaults, FileConfig};
use crate::{exit_for, EXIT_INVALID};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// ((m-1) a - beta)^2 / 4 for submanifolds of Hadamard manifolds.
    Hadamard,
    /// Theorem bound on a component inside the ball B(p, r).
    Ball,
    /// (m-1)^2 a^2 / 4.
    Mckean,
    /// (m-1-c)^2 / 4 in H^n(-1).
    CheungLeung,
    /// (inf div X / (2 sup |X|))^2.
    MainLemma,
    /// Comparison function from a lower curvature bound.
    Mu0,
    /// Comparison function from an upper curvature bound.
    Mu1,
    /// (m-1) mu1(r) - h.
    DivLower,
    /// Supremum of the radii the ball bound admits.
    AdmissibleRadius,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(value_enum)]
    kind: BoundKind,
    /// Submanifold dimension.
    #[arg(long)]
    m: Option<usize>,
    /// Ambient curvature is at most -a^2.
    #[arg(long)]
    a: Option<f64>,
    /// Bound on |H|.
    #[arg(long)]
    beta: Option<f64>,
    /// Bound on |H| (Cheung-Leung).
    #[arg(long)]
    c: Option<f64>,
    /// Sectional curvature bound (sign selects the regime).
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// h(p, r), the supremum of |H| in the ball.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Distance at which to evaluate mu0/mu1.
    #[arg(long)]
    rho: Option<f64>,
    /// Injectivity radius at p (default: infinite).
    #[arg(long)]
    inj: Option<f64>,
    /// Ambient dimension (default: m + 1).
    #[arg(long)]
    ambient_dim: Option<usize>,
    #[arg(long)]
    inf_div: Option<f64>,
    #[arg(long)]
    sup_norm: Option<f64>,
    /// Print only the JSON record.
    #[arg(long)]
    json: bool,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("missing --{flag}")))
}

struct Outcome {
    value: f64,
    case_tag: Option<String>,
    chain: String,
    checks: Vec<String>,
    record: serde_json::Value,
}

fn from_bound(b: EigenvalueBound, chain: String, checks: Vec<String>) -> Result<Outcome> {
    Ok(Outcome {
        value: b.value,
        case_tag: Some(b.case_tag.as_str().to_string()),
        chain,
        checks,
        record: serde_json::to_value(&b).map_err(Error::from)?,
    })
}

fn number(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn evaluate(a: &BoundArgs, d: &BoundDefaults) -> Result<Outcome> {
    let m = || need(a.m.or(d.m), "m");
    let aa = || need(a.a.or(d.a), "a");
    let kappa = || need(a.kappa.or(d.kappa), "kappa");
    let h = || need(a.h.or(d.h), "h");
    let r = || need(a.r.or(d.r), "r");
    let ctx = || -> Result<BallContext> {
        let m = m()?;
        let inj = a.inj.or(d.inj).unwrap_or(f64::INFINITY);
        BallContext::constant(m, a.ambient_dim.or(d.ambient_dim).unwrap_or(m + 1), inj, kappa()?, h()?)
    };
    match a.kind {
        BoundKind::Hadamard => {
            let (m, av, beta) = (m()?, aa()?, need(a.beta.or(d.beta), "beta")?);
            let b = hadamard_bound(m, av, beta)?;
            let s = (m - 1) as f64 * av;
            from_bound(
                b,
                format!("lambda_1 >= ((m-1) a - beta)^2 / 4 = ({s} - {beta})^2 / 4"),
                vec![format!("beta < (m-1)*a: {beta} < {s}"), format!("a > 0: {av}")],
            )
        }
        BoundKind::Mckean => {
            let (m, av) = (m()?, aa()?);
            from_bound(mckean_bound(m, av)?, format!("lambda_1 >= (m-1)^2 a^2 / 4 = ({} * {av})^2 / 4", m - 1), vec![])
        }
        BoundKind::CheungLeung => {
            let (m, c) = (m()?, need(a.c.or(d.c), "c")?);
            from_bound(
                cheung_leung_bound(m, c)?,
                format!("lambda_1 >= (m-1-c)^2 / 4 = ({} - {c})^2 / 4", m - 1),
                vec![format!("c < m-1: {c} < {}", m - 1)],
            )
        }
        BoundKind::MainLemma => {
            let (d0, s) = (need(a.inf_div, "inf-div")?, need(a.sup_norm, "sup-norm")?);
            from_bound(
                main_lemma_bound(d0, s)?,
                format!("lambda_1 >= (inf div X / (2 sup|X|))^2 = ({d0} / (2 * {s}))^2"),
                vec![format!("inf div X > 0: {d0}")],
            )
        }
        BoundKind::Ball => {
            let (ctx, r) = (ctx()?, r()?);
            let adm = admissible_radius(&ctx)?;
            let b = ball_eigenvalue_bound(&ctx, r)?;
            let (floor, _, regime, hv) = bullet_divergence_floor(&ctx, r)?;
            from_bound(
                b,
                format!(
                    "lambda_1 >= (div floor / 2)^2 with div grad(rho o phi) >= {floor} ({regime}, h = {hv}, r = {r}) and |grad(rho o phi)| <= 1"
                ),
                vec![format!("r < admissible supremum: {r} < {}", adm.radius), format!("divergence floor > 0: {floor}")],
            )
        }
        BoundKind::Mu0 | BoundKind::Mu1 => {
            let rho = need(a.rho, "rho")?;
            let reg = CurvatureBound::from_sectional(kappa()?)?;
            let (name, v) = if a.kind == BoundKind::Mu0 { ("mu0", mu0(rho, reg)?) } else { ("mu1", mu1(rho, reg)?) };
            Ok(Outcome {
                value: v,
                case_tag: None,
                chain: format!("{name}({rho}) for {reg}"),
                checks: vec![],
                record: json!({ "function": name, "rho": rho, "curvature": reg, "value": v }),
            })
        }
        BoundKind::DivLower => {
            let (m, reg, r, h) = (m()?, CurvatureBound::from_sectional(kappa()?)?, r()?, h()?);
            let v = div_lower_bound(m, reg, r, h)?;
            Ok(Outcome {
                value: v,
                case_tag: None,
                chain: format!("(m-1) mu1(r) - h for {reg}, r = {r}, h = {h}"),
                checks: vec![],
                record: json!({ "function": "div_lower_bound", "m": m, "r": r, "h": h, "curvature": reg, "value": v }),
            })
        }
        BoundKind::AdmissibleRadius => {
            let adm = admissible_radius(&ctx()?)?;
            Ok(Outcome {
                value: adm.radius,
                case_tag: Some(adm.case_tag.as_str().into()),
                chain: format!("read kappa = {} and h = {} at scale {}", adm.kappa, adm.h, adm.scale),
                checks: vec![],
                record: json!({
                    "radius": number(adm.radius),
                    "case_tag": adm.case_tag,
                    "scale": number(adm.scale),
                    "kappa": adm.kappa,
                    "h": adm.h,
                }),
            })
        }
    }
}

pub fn run(args: BoundArgs, cfg: &FileConfig) -> u8 {
    let defaults = cfg.bound.clone().unwrap_or_default();
    match evaluate(&args, &defaults) {
        Ok(out) => {
            if args.json {
                println!("{}", out.record);
            } else {
                println!("value: {}", out.value);
                if let Some(t) = &out.case_tag {
                    println!("case_tag: {t}");
                }
                println!("chain: {}", out.chain);
                for c in &out.checks {
                    println!("check: {c} ok");
                }
                println!("{}", out.record);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConvergence { .. } => exit_for(&e),
                _ => EXIT_INVALID,
            }
        }
    }
}

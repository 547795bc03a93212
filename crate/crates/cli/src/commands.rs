//! The five subcommands. Each returns a JSON document and a flat table.

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use subgauss::entropy::EntropySettings;
use subgauss::growth::{CellConstants, CellScale, GrowthConstants, GrowthSpec, Partition, SeriesSettings, SeriesSum, Weight};
use subgauss::heat::{
    omega_spectral_inputs, omega_spectral_sup_norm, spectral_moment, Rect, SheModel, SheParams, SpectralMeasure, DEFAULT_TOL,
};
use subgauss::sim::{empirical_sup_tail, verify_bound, FieldKernel, FieldSampler, GaussianFieldModel, KernelSettings};
use subgauss::{AnisotropicBox, Error, FieldBoundInputs, HolderProfile, PhiFamily, TailCurve, TailPoint};

use crate::config::{
    BoxConfig, EntropyMode, GrowthKind, ModelConfig, ProfileConfig, RectConfig, RunConfig, SimField, SpectralConfig, SupField,
    ThetaConfig,
};
use crate::output::{num, opt_num, CommandOutput, Table};

fn rect(r: &RectConfig) -> Result<Rect> {
    Ok(Rect::new((r.t[0], r.t[1]), (r.x[0], r.x[1]))?)
}

fn aniso_box(b: &BoxConfig) -> Result<AnisotropicBox<f64>> {
    Ok(AnisotropicBox::new((b.t[0], b.t[1]), (b.x[0], b.x[1]), (b.exponents[0], b.exponents[1]))?)
}

fn she_model(cfg: &RunConfig) -> Result<SheModel> {
    let m: &ModelConfig = cfg.model.as_ref().context("config needs a model block")?;
    let params = SheParams {
        h: m.h,
        rho: m.rho,
        l: m.l,
        c0: m.c0,
        c_phi: m.c_phi,
        family: PhiFamily::new(m.alpha)?,
    };
    Ok(SheModel::new(params, cfg.tol.unwrap_or(DEFAULT_TOL))?)
}

fn spectral(cfg: &RunConfig) -> Result<(SpectralMeasure, f64)> {
    let m = cfg.model.as_ref().context("config needs a model block")?;
    match m.spectral.as_ref().context("model needs a spectral block")? {
        SpectralConfig::Matern { sigma2, alpha, eps } => Ok((SpectralMeasure::matern(*sigma2, *alpha)?, *eps)),
    }
}

fn series_json(s: &SeriesSum<f64>) -> Value {
    json!({
        "value": s.value,
        "half_width": s.half_width,
        "terms": s.terms,
        "certificate": s.certificate.as_str(),
    })
}

/// Level-wise failures that mean "no bound here" rather than a bad config.
fn not_asserted(e: &Error) -> Option<&'static str> {
    match e {
        Error::BelowThreshold { .. } => Some("below_threshold"),
        Error::NoValidTheta { .. } => Some("no_valid_theta"),
        Error::InvalidTheta { .. } => Some("invalid_theta"),
        _ => None,
    }
}

pub fn constants(cfg: &RunConfig) -> Result<CommandOutput> {
    let model = she_model(cfg)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let n = &model.noise;
    let entries: Vec<(&str, f64)> = vec![
        ("C_H", n.c_h),
        ("c1_H", n.c1h),
        ("c2_H", n.c2h),
        ("c3_H", n.c3h),
        ("c_V", n.c_v),
        ("A_H", n.a_h),
        ("C1_rho", model.c1_rho),
        ("c", model.c),
        ("c_omega", model.c_omega),
    ];
    let mut table = Table::new(&["key", "value"]);
    let mut consts = serde_json::Map::new();
    for (k, v) in &entries {
        consts.insert((*k).into(), json!(v));
        table.push(vec![(*k).into(), num(*v)]);
    }
    let mut notes = vec![
        "c1_H = Gamma(1 - H) 2^(H - 1) / H, so that E V(t,x)^2 = C_H c1_H t^H".to_string(),
        format!("c2_H = integral over (0, inf) of (1 - exp(-u^2))^2 u^(-1-2H) du, absolute tolerance {tol:e}"),
        "sup-tail exponents use u(1 - theta) - (2/theta) I(theta eps0), minus sign".to_string(),
    ];
    let mut doc = json!({
        "model": cfg.model,
        "tolerance": tol,
        "constants": consts,
    });
    if cfg.model.as_ref().is_some_and(|m| m.spectral.is_some()) {
        let (f, eps) = spectral(cfg)?;
        let c2 = spectral_moment(&f, eps, tol)?;
        let sup = omega_spectral_sup_norm(&f, tol)?;
        for (k, v) in [("spectral_c2_eps", c2), ("spectral_c_eps", c2.sqrt()), ("spectral_sup_norm", sup)] {
            table.push(vec![k.into(), num(v)]);
        }
        doc["spectral"] = json!({ "eps": eps, "c2_eps": c2, "c_eps": c2.sqrt(), "sup_norm": sup });
        notes.push("Matern c(eps)^2 = sigma2 B(eps + 1/2, 2 alpha - eps - 1/2); at eps = 1/2 this is sigma2 / (2 alpha - 1)".into());
    }
    doc["notes"] = json!(notes);
    Ok(CommandOutput::new("constants", doc, table))
}

fn sup_inputs(cfg: &RunConfig, field: &SupField) -> Result<FieldBoundInputs<f64>> {
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    Ok(match field {
        SupField::Generic {
            alpha,
            bx,
            profile,
            eps0,
            gamma0,
        } => {
            let prof = match profile {
                ProfileConfig::Power { scale, exponent } => HolderProfile::power(*scale, *exponent)?,
                ProfileConfig::Tabulated { h, sigma } => HolderProfile::tabulated(h.clone(), sigma.clone())?,
            };
            let inputs = FieldBoundInputs::new(*eps0, aniso_box(bx)?, prof, PhiFamily::new(*alpha)?)?;
            match gamma0 {
                Some(g) => inputs.with_gamma0(*g)?,
                None => inputs,
            }
        }
        SupField::V { rect: r } => she_model(cfg)?.v_inputs(&rect(r)?)?,
        SupField::Omega { rect: r } => she_model(cfg)?.omega_inputs(&rect(r)?)?,
        SupField::OmegaSpectral { rect: r } => {
            let m = cfg.model.as_ref().context("config needs a model block")?;
            let (f, eps) = spectral(cfg)?;
            omega_spectral_inputs(&f, eps, m.c_phi, PhiFamily::new(m.alpha)?, &rect(r)?, tol)?
        }
    })
}

/// Bound and `θ` at one level, `None` where the bound is not asserted.
fn sup_point(
    inputs: &FieldBoundInputs<f64>,
    u: f64,
    theta: ThetaConfig,
    entropy: EntropyMode,
    settings: &EntropySettings<f64>,
) -> Result<(Option<(f64, f64)>, &'static str)> {
    let r = match (theta, entropy) {
        (ThetaConfig::Optimize, EntropyMode::Closed) => inputs.optimize_theta(u).map(|o| (o.bound, o.theta)),
        (ThetaConfig::Optimize, EntropyMode::Numeric) => inputs.optimize_theta_numeric(u, settings).map(|o| (o.bound, o.theta)),
        (ThetaConfig::Fixed { value }, EntropyMode::Closed) => inputs.sup_tail_bound(u, value).map(|b| (b, value)),
        (ThetaConfig::Fixed { value }, EntropyMode::Numeric) => inputs.sup_tail_bound_numeric(u, value, settings).map(|b| (b, value)),
    };
    match r {
        Ok(v) => Ok((Some(v), "ok")),
        Err(e) => match not_asserted(&e) {
            Some(why) => Ok((None, why)),
            None => Err(e.into()),
        },
    }
}

fn entropy_settings(cfg: &RunConfig) -> EntropySettings<f64> {
    match cfg.tol {
        Some(t) => EntropySettings::default().with_tol(t),
        None => EntropySettings::default(),
    }
}

pub fn bound_sup(cfg: &RunConfig) -> Result<CommandOutput> {
    let sup = cfg.sup.as_ref().context("config needs a sup block")?;
    let inputs = sup_inputs(cfg, &sup.field)?;
    let levels = cfg.u_levels()?;
    subgauss::curve::check_u_grid(&levels)?;
    let settings = entropy_settings(cfg);
    let mut table = Table::new(&["u", "bound", "theta", "status"]);
    let mut points = Vec::new();
    for &u in &levels {
        let (v, status) = sup_point(&inputs, u, sup.theta, sup.entropy, &settings)?;
        table.push(vec![num(u), opt_num(v.map(|p| p.0)), opt_num(v.map(|p| p.1)), status.into()]);
        points.push(json!({ "u": u, "bound": v.map(|p| p.0), "theta": v.map(|p| p.1), "status": status }));
    }
    let closed = inputs.closed_entropy().ok();
    let inf = inputs.inf_threshold().ok();
    let doc = json!({
        "field": sup.field,
        "theta": sup.theta,
        "entropy": sup.entropy,
        "alpha": inputs.family.alpha(),
        "eps0": inputs.eps0,
        "gamma0": inputs.gamma0,
        "c1": closed.map(|c| c.c1),
        "gamma_beta": closed.map(|c| c.gamma_beta),
        "inf_threshold": inf.map(|(theta, u)| json!({ "theta": theta, "u": u })),
        "points": points,
    });
    Ok(CommandOutput::new("bound-sup", doc, table))
}

fn growth_spec(cfg: &RunConfig) -> Result<GrowthSpec<f64>> {
    let g = cfg.growth.as_ref().context("config needs a growth block")?;
    let mut series = SeriesSettings::default();
    if let Some(t) = cfg.tol {
        series = series.with_tol(t);
    }
    if let Some(n) = g.max_terms {
        series = series.with_max_terms(n);
    }
    Ok(match &g.spec {
        GrowthKind::She { p, half_width } => she_model(cfg)?.v_growth_spec(*p, *half_width, series)?,
        GrowthKind::Generic {
            half_width,
            gamma,
            exponents,
            alpha,
            weight_exponent,
            log_power,
            c_delta,
            delta,
            cell_constant,
        } => {
            let spec = GrowthSpec {
                partition: Partition::Exponential,
                weight: Weight::PowerLog {
                    exponent: *weight_exponent,
                    log_power: *log_power,
                },
                scale: CellScale::PowerEnvelope {
                    c_delta: *c_delta,
                    delta: *delta,
                },
                constants: CellConstants::Uniform(*cell_constant),
                half_width: *half_width,
                gamma: *gamma,
                exponents: (exponents[0], exponents[1]),
                family: PhiFamily::new(*alpha)?,
                series,
            };
            spec.validate()?;
            spec
        }
    })
}

/// `(bound, θ)` for the fixed-rule and optimised curves.
type GrowthPoint = (Option<(f64, f64)>, Option<(f64, f64)>);

fn growth_point(k: &GrowthConstants<f64>, u: f64) -> Result<GrowthPoint> {
    let soft = |r: subgauss::Result<(f64, f64)>| -> Result<Option<(f64, f64)>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e) if not_asserted(&e).is_some() => Ok(None),
            Err(e) => Err(e.into()),
        }
    };
    let remark = soft(k.remark_bound(u).map(|b| (b, k.remark_theta(u))))?;
    let opt = soft(k.optimize_theta(u).map(|(t, b)| (b, t)))?;
    Ok((remark, opt))
}

pub fn bound_growth(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = growth_spec(cfg)?;
    let k = spec.constants()?;
    let levels = cfg.u_levels()?;
    subgauss::curve::check_u_grid(&levels)?;
    let mut table = Table::new(&["u", "remark_bound", "remark_theta", "optimized_bound", "optimized_theta"]);
    let mut points = Vec::new();
    for &u in &levels {
        let (remark, opt) = growth_point(&k, u)?;
        table.push(vec![
            num(u),
            opt_num(remark.map(|p| p.0)),
            opt_num(remark.map(|p| p.1)),
            opt_num(opt.map(|p| p.0)),
            opt_num(opt.map(|p| p.1)),
        ]);
        points.push(json!({
            "u": u,
            "remark_bound": remark.map(|p| p.0),
            "remark_theta": remark.map(|p| p.1),
            "optimized_bound": opt.map(|p| p.0),
            "optimized_theta": opt.map(|p| p.1),
        }));
    }
    let doc = json!({
        "growth": cfg.growth,
        "C": series_json(&k.c),
        "S": series_json(&k.s),
        "theta_tilde": k.theta_tilde,
        "gamma_beta": k.gamma_beta,
        "remark_threshold": k.remark_threshold(),
        "points": points,
    });
    Ok(CommandOutput::new("bound-growth", doc, table))
}

pub fn covering(cfg: &RunConfig) -> Result<CommandOutput> {
    let c = cfg.covering.as_ref().context("config needs a covering block")?;
    let bx = aniso_box(&c.bx)?;
    let mut table = Table::new(&["eps", "upper_bound", "oracle", "resolution"]);
    let mut rows = Vec::new();
    for &eps in &c.eps {
        let upper = bx.covering_upper_bound(eps)?;
        let res = c.resolution.unwrap_or_else(|| bx.oracle_resolution(eps));
        let oracle = bx.covering_oracle(eps, res)?;
        table.push(vec![num(eps), num(upper), oracle.to_string(), res.to_string()]);
        rows.push(json!({ "eps": eps, "upper_bound": upper, "oracle": oracle, "resolution": res }));
    }
    let doc = json!({ "box": c.bx, "diameter": bx.diameter(), "rows": rows });
    Ok(CommandOutput::new("covering", doc, table))
}

pub fn simulate_verify(cfg: &RunConfig) -> Result<CommandOutput> {
    let s = cfg.simulate.as_ref().context("config needs a simulate block")?;
    let seed = cfg.seed.context("simulate-verify needs an explicit seed")?;
    if s.samples == 0 {
        bail!("simulate.samples must be positive");
    }
    let levels = cfg.u_levels()?;
    subgauss::curve::check_u_grid(&levels)?;
    let r = rect(&s.rect)?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    let (kernel, inputs) = match s.field {
        SimField::V => {
            let m = cfg.model.as_ref().context("config needs a model block")?;
            (FieldKernel::V { h: m.h }, she_model(cfg)?.v_inputs(&r)?)
        }
        SimField::OmegaSpectral => {
            let (f, eps) = spectral(cfg)?;
            // a Gaussian initial condition: c_phi = 1 in the Gaussian family
            let inputs = omega_spectral_inputs(&f, eps, 1.0, PhiFamily::gaussian(), &r, tol)?;
            (FieldKernel::Omega { measure: f }, inputs)
        }
    };
    let settings = KernelSettings { tol, mu: 1.0 };
    let model = GaussianFieldModel::regular(kernel, &r, s.nt, s.nx, settings)?;
    let sampler = FieldSampler::new(&model)?;
    let sups = sampler.sample_sup(s.samples, seed);
    let empirical = empirical_sup_tail(&sups, &levels)?;
    let entropy = entropy_settings(cfg);
    let mut theory = Vec::with_capacity(levels.len());
    for &u in &levels {
        let (v, _) = sup_point(&inputs, u, s.theta, EntropyMode::Closed, &entropy)?;
        theory.push(TailPoint::bound(u, v.map(|p| p.0), v.map(|p| p.1)));
    }
    let theoretical = TailCurve::new(theory)?;
    let report = verify_bound(&empirical, &theoretical)?;
    let mut table = Table::new(&["u", "empirical", "ci_lo", "ci_hi", "bound", "verdict"]);
    for row in &report.rows {
        table.push(vec![
            num(row.u),
            num(row.empirical),
            num(row.ci_lo),
            num(row.ci_hi),
            opt_num(row.bound),
            row.verdict.as_str().into(),
        ]);
    }
    let doc = json!({
        "field": s.field,
        "rect": s.rect,
        "grid": { "nt": s.nt, "nx": s.nx, "points": model.grid.len() },
        "samples": s.samples,
        "jitter": sampler.jitter(),
        "eps0": inputs.eps0,
        "inf_threshold": inputs.inf_threshold().ok().map(|(theta, u)| json!({ "theta": theta, "u": u })),
        "confidence": subgauss::sim::tail::CONFIDENCE,
        "passed": report.passed,
        "failed": report.failed,
        "not_asserted": report.not_asserted,
        "all_pass": report.all_pass(),
        "note": report.note,
        "rows": report.rows,
    });
    let mut out = CommandOutput::new("simulate-verify", doc, table);
    out.failed = !report.all_pass();
    Ok(out)
}

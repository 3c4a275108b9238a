//! Command implementations shared by the binary and the integration tests.

use anyhow::{bail, Context};
use serde_json::json;

use fdiff_core::chain::{
    chain_rule_associativity_check, chain_rule_check, chain_rule_counts,
    chain_rule_unit_checks, fit_integer_polynomial, tangent_monad_check, ChainAssocParams,
};
use fdiff_core::classes::lattice::{n_star, small_lattice_library};
use fdiff_core::classes::{
    analytic_functor, enumerate_sup_maps, euler_check, filter_functor, filter_monad,
    lattice_map_transf, monad_laws_check, normalized_exponential, powerset_functor,
    powerset_monad, quot_power_functor, reconstruct_phi, ultrafilter_functor, ClassSpec,
    Lattice, QuotPowerSpec, SpeciesSpec,
};
use fdiff_core::delta::rules::{finite_product_rule_check, product_rule_check};
use fdiff_core::delta::symbolic::{symbolic_delta, verify_symbolic_delta};
use fdiff_core::delta::{counting_law_check, sum_decomposition_check};
use fdiff_core::diagram::{
    check_colimit_commutes_with_inverse_images, confluent_via_representables,
    CommutationParams, FinCat,
};
use fdiff_core::functor::{power, CheckParams, Endofunctor};
use fdiff_core::group::PermGroup;
use fdiff_core::newton::{delta_star, newton_sum, roundtrip_check, unit_iso_check};
use fdiff_core::{FinSet, Report};

use crate::config::Config;
use crate::output::CmdOutput;
use crate::parse::{parse, realize, FunctorExpr, Realized};

fn parse_expr(input: &str) -> anyhow::Result<FunctorExpr> {
    parse(input).map_err(anyhow::Error::from)
}

fn realize_expr(input: &str, cfg: &Config) -> anyhow::Result<Realized> {
    let expr = parse_expr(input)?;
    realize(&expr, &cfg.check_params()).with_context(|| format!("realizing `{expr}`"))
}

fn base_output(command: &str, cfg: &Config) -> CmdOutput {
    let mut out = CmdOutput::new(command);
    out.param("seed", format!("{:#x}", cfg.seed));
    out.param("bound", cfg.bound);
    out
}

pub fn cmd_eval(expr: &str, sizes: &[usize], cfg: &Config) -> anyhow::Result<CmdOutput> {
    let realized = realize_expr(expr, cfg)?;
    let mut out = base_output("eval", cfg);
    out.param("expr", expr);
    for &k in sizes {
        let value = realized.functor.at(&FinSet::atoms(k));
        let elements = if value.len() <= 64 {
            value.to_string()
        } else {
            format!("({} elements)", value.len())
        };
        out.row(vec![
            ("k", json!(k)),
            ("count", json!(value.len())),
            ("elements", json!(elements)),
        ]);
    }
    Ok(out)
}

pub fn cmd_table(expr: &str, maxk: usize, cfg: &Config) -> anyhow::Result<CmdOutput> {
    let realized = realize_expr(expr, cfg)?;
    let mut out = base_output("table", cfg);
    out.param("expr", expr);
    if let Some(class) = &realized.class {
        out.param("class", class.class_name());
        if let Ok(sd) = symbolic_delta(class) {
            out.param("symbolic_delta", sd.spec.display());
        }
    }
    for k in 0..=maxk {
        out.row(vec![
            ("k", json!(k)),
            ("count", json!(realized.functor.at(&FinSet::atoms(k)).len())),
        ]);
    }
    Ok(out)
}

pub fn cmd_delta(expr: &str, cfg: &Config) -> anyhow::Result<CmdOutput> {
    let realized = realize_expr(expr, cfg)?;
    let mut out = base_output("delta", cfg);
    out.param("expr", expr);
    realized.functor.require_taut()?;
    let operational = fdiff_core::delta::delta(&realized.functor)?;
    for k in 0..=4usize {
        out.row(vec![
            ("k", json!(k)),
            ("count", json!(operational.at(&FinSet::atoms(k)).len())),
        ]);
    }
    match &realized.class {
        Some(class) => {
            let sd = symbolic_delta(class)?;
            out.param("symbolic_delta", sd.spec.display());
            let bound = cfg.bound.min(4).max(3);
            out.set_report(verify_symbolic_delta(&sd, bound));
        }
        None => {
            out.param("symbolic_delta", "none (no closed-form class for this expression)");
            let mut r = Report::new("delta[operational-only]");
            r.record_case();
            out.set_report(r);
        }
    }
    Ok(out)
}

pub fn cmd_chain(f: &str, g: &str, maxk: usize, cfg: &Config) -> anyhow::Result<CmdOutput> {
    let rf = realize_expr(f, cfg)?;
    let rg = realize_expr(g, cfg)?;
    rf.functor.require_taut()?;
    rg.functor.require_taut()?;
    let mut out = base_output("chain", cfg);
    out.param("F", f);
    out.param("G", g);
    let rows = chain_rule_counts(&rf.functor, &rg.functor, maxk)?;
    for (k, lhs, rhs) in &rows {
        out.row(vec![
            ("k", json!(k)),
            ("lhs", json!(lhs)),
            ("rhs", json!(rhs)),
        ]);
    }
    let lhs: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let rhs: Vec<usize> = rows.iter().map(|r| r.2).collect();
    if let Some(c) = fit_integer_polynomial(&lhs) {
        out.param("lhs_coefficients", format!("{c:?}"));
    }
    if let Some(c) = fit_integer_polynomial(&rhs) {
        out.param("rhs_coefficients", format!("{c:?}"));
    }
    out.set_report(chain_rule_check(&rf.functor, &rg.functor, cfg.bound.min(3))?);
    Ok(out)
}

/// The shipped instance library driven by `verify taut`.
pub fn instance_library() -> Vec<Endofunctor> {
    let mut out: Vec<Endofunctor> = Vec::new();
    for n in 1..=4 {
        out.push(power(n));
        out.push(quot_power_functor(&QuotPowerSpec::divided_power(n)));
    }
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(3, PermGroup::cyclic(3).unwrap())]).unwrap(),
    ));
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(
            4,
            PermGroup::from_generators(4, vec![vec![1, 0, 3, 2]]).unwrap(),
        )])
        .unwrap(),
    ));
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(
            4,
            PermGroup::from_generators(4, vec![vec![1, 0, 2, 3]]).unwrap(),
        )])
        .unwrap(),
    ));
    out.push(analytic_functor(&SpeciesSpec::free_at(2).unwrap()));
    out.push(analytic_functor(
        &SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap(),
    ));
    out.push(normalized_exponential(&Lattice::chain(2).unwrap()));
    out.push(normalized_exponential(&Lattice::chain(3).unwrap()));
    out.push(normalized_exponential(&n_star(6).unwrap()));
    out.push(filter_functor());
    out.push(powerset_functor());
    out.push(ultrafilter_functor());
    out
}

pub struct VerifyOpts {
    pub f: Option<String>,
    pub g: Option<String>,
    pub expr: Option<String>,
    pub degree: usize,
    pub trials: usize,
    pub lattice_file: Option<std::path::PathBuf>,
}

pub fn cmd_verify(suite: &str, opts: &VerifyOpts, cfg: &Config) -> anyhow::Result<CmdOutput> {
    let mut out = base_output("verify", cfg);
    out.param("suite", suite);
    out.set_report(Report::new(format!("{suite}-suite")));
    match suite {
        "taut" => verify_taut(&mut out, opts, cfg)?,
        "product-rule" => verify_product_rule(&mut out, opts, cfg)?,
        "chain-rule" => verify_chain_rule(&mut out, opts, cfg)?,
        "confluence" => verify_confluence(&mut out, cfg)?,
        "newton-roundtrip" => verify_newton_roundtrip(&mut out, opts, cfg)?,
        "dirichlet" => verify_dirichlet(&mut out, opts, cfg)?,
        "monads" => verify_monads(&mut out)?,
        other => bail!(
            "unknown suite `{other}` (expected taut, product-rule, chain-rule, confluence, newton-roundtrip, dirichlet, monads)"
        ),
    }
    Ok(out)
}

fn verify_taut(out: &mut CmdOutput, opts: &VerifyOpts, cfg: &Config) -> anyhow::Result<()> {
    let instances: Vec<Endofunctor> = match &opts.expr {
        Some(e) => vec![realize_expr(e, cfg)?.functor],
        None => instance_library(),
    };
    let params = cfg.check_params();
    for f in &instances {
        let r = f.verify_taut(&params);
        out.row(vec![
            ("functor", json!(f.name())),
            ("status", json!(if r.passed() { "pass" } else { "fail" })),
            ("cases", json!(r.cases)),
        ]);
        out.set_report(r);
        if f.is_taut_verified() {
            let c = counting_law_check(f, 5)?;
            out.set_report(c);
            let s = sum_decomposition_check(f, 3)?;
            out.set_report(s);
        }
    }
    Ok(())
}

fn verify_product_rule(
    out: &mut CmdOutput,
    opts: &VerifyOpts,
    cfg: &Config,
) -> anyhow::Result<()> {
    let f = realize_expr(opts.f.as_deref().unwrap_or("X"), cfg)?.functor;
    let g = realize_expr(opts.g.as_deref().unwrap_or("X^2"), cfg)?.functor;
    f.require_taut()?;
    g.require_taut()?;
    out.set_report(product_rule_check(&f, &g, cfg.bound.min(3))?);
    let triple = vec![f.clone(), g.clone(), f.clone()];
    out.set_report(finite_product_rule_check(&triple, 2)?);
    Ok(())
}

fn verify_chain_rule(
    out: &mut CmdOutput,
    opts: &VerifyOpts,
    cfg: &Config,
) -> anyhow::Result<()> {
    let f = realize_expr(opts.f.as_deref().unwrap_or("X^2"), cfg)?.functor;
    let g = realize_expr(opts.g.as_deref().unwrap_or("X^2"), cfg)?.functor;
    f.require_taut()?;
    g.require_taut()?;
    let rows = chain_rule_counts(&f, &g, 3)?;
    for (k, lhs, rhs) in &rows {
        out.row(vec![
            ("k", json!(k)),
            ("lhs", json!(lhs)),
            ("rhs", json!(rhs)),
        ]);
    }
    let lhs: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let rhs: Vec<usize> = rows.iter().map(|r| r.2).collect();
    if let (Some(a), Some(b)) = (fit_integer_polynomial(&lhs), fit_integer_polynomial(&rhs)) {
        out.param("lhs_coefficients", format!("{a:?}"));
        out.param("rhs_coefficients", format!("{b:?}"));
    }
    out.set_report(chain_rule_check(&f, &g, cfg.bound.min(3))?);
    out.set_report(chain_rule_unit_checks(&f, 2)?);
    out.set_report(chain_rule_associativity_check(
        &f,
        &g,
        &f,
        &ChainAssocParams::default(),
    )?);
    Ok(())
}

fn verify_confluence(out: &mut CmdOutput, cfg: &Config) -> anyhow::Result<()> {
    for shape in FinCat::shape_library() {
        let direct = shape.is_confluent();
        let oracle = confluent_via_representables(&shape);
        let commutation = check_colimit_commutes_with_inverse_images(
            &shape,
            &CommutationParams { trials: 25, seed: cfg.seed, max_fiber: 4 },
        );
        out.row(vec![
            ("shape", json!(shape.name())),
            ("confluent", json!(direct)),
            ("oracle_agrees", json!(direct == oracle)),
            (
                "commutation",
                json!(if commutation.passed() { "pass" } else { "counterexample" }),
            ),
        ]);
        let mut r = Report::new(format!("confluence[{}]", shape.name()));
        r.record_case();
        if direct != oracle {
            r.fail("oracle", "representable criterion disagrees");
        }
        if direct != commutation.passed() {
            r.fail(
                "commutation",
                "commutation verdict disagrees with confluence",
            );
        }
        out.set_report(r);
    }
    Ok(())
}

fn verify_newton_roundtrip(
    out: &mut CmdOutput,
    opts: &VerifyOpts,
    cfg: &Config,
) -> anyhow::Result<()> {
    let expr = opts.expr.as_deref().unwrap_or("X^2");
    let f = realize_expr(expr, cfg)?.functor;
    f.require_taut()?;
    out.param("expr", expr);
    out.param("degree", opts.degree);
    out.set_report(roundtrip_check(&f, opts.degree, cfg.bound.min(4))?);
    let ds = delta_star(&f, opts.degree)?;
    for n in 0..=opts.degree {
        out.row(vec![("n", json!(n)), ("delta_n_at_zero", json!(ds.set(n).len()))]);
    }
    Ok(())
}

fn verify_dirichlet(
    out: &mut CmdOutput,
    opts: &VerifyOpts,
    cfg: &Config,
) -> anyhow::Result<()> {
    // representation round trip over the small library (plus any supplied
    // lattice file)
    let mut lib = small_lattice_library();
    if let Some(path) = &opts.lattice_file {
        lib.push(crate::species_io::load_lattice(path)?);
    }
    let mut round = Report::new("representation-round-trip");
    for src in &lib {
        for dst in &lib {
            for phi in enumerate_sup_maps(src, dst) {
                round.record_case();
                let t = lattice_map_transf(&phi);
                match reconstruct_phi(&t, src, dst) {
                    Ok(back) if back.map == phi.map => {}
                    _ => round.fail(
                        format!("{} -> {}", src.name(), dst.name()),
                        "round trip failed",
                    ),
                }
            }
        }
    }
    out.row(vec![
        ("check", json!("representation-round-trip")),
        ("cases", json!(round.cases)),
        ("status", json!(if round.passed() { "pass" } else { "fail" })),
    ]);
    out.set_report(round);
    // the chain formula
    for n in 1..=4usize {
        let sd = symbolic_delta(&ClassSpec::NormalizedExponential(Lattice::chain(n)?))?;
        let r = verify_symbolic_delta(&sd, 3);
        out.row(vec![
            ("check", json!(format!("chain{n}-difference"))),
            ("status", json!(if r.passed() { "pass" } else { "fail" })),
        ]);
        out.set_report(r);
    }
    // Euler
    let e = euler_check(&[2, 3], 12, cfg.bound.min(3))?;
    out.row(vec![
        ("check", json!("euler-2-3-12")),
        ("status", json!(if e.passed() { "pass" } else { "fail" })),
    ]);
    out.set_report(e);
    Ok(())
}

fn verify_monads(out: &mut CmdOutput) -> anyhow::Result<()> {
    for m in [filter_monad(), powerset_monad()] {
        let name = m.name.clone();
        let laws = monad_laws_check(&m, 3)?;
        let tangent = tangent_monad_check(&m, 2)?;
        out.row(vec![
            ("monad", json!(name)),
            ("laws", json!(if laws.passed() { "pass" } else { "fail" })),
            (
                "tangent_monad",
                json!(if tangent.passed() { "pass" } else { "fail" }),
            ),
        ]);
        out.set_report(laws);
        out.set_report(tangent);
    }
    // the ultrafilter functor is taut but carries no taut monad here
    let beta = ultrafilter_functor();
    let r = beta.verify_taut(&CheckParams::default());
    out.set_report(r);
    Ok(())
}

pub struct NewtonOpts {
    pub sum: Option<std::path::PathBuf>,
    pub delta_star: Option<String>,
    pub roundtrip: Option<String>,
    pub degree: usize,
    pub maxk: usize,
}

pub fn cmd_newton(opts: &NewtonOpts, cfg: &Config) -> anyhow::Result<CmdOutput> {
    let mut out = base_output("newton", cfg);
    let mut acted = false;
    if let Some(path) = &opts.sum {
        acted = true;
        let soft = crate::species_io::load_soft_species(path)?;
        out.param("species", path.display().to_string());
        let f = newton_sum(&soft);
        for k in 0..=opts.maxk {
            out.row(vec![
                ("k", json!(k)),
                ("count", json!(f.at(&FinSet::atoms(k)).len())),
            ]);
        }
        out.set_report(f.verify_taut(&cfg.check_params()));
        out.set_report(unit_iso_check(&soft)?);
    }
    if let Some(expr) = &opts.delta_star {
        acted = true;
        let f = realize_expr(expr, cfg)?.functor;
        f.require_taut()?;
        out.param("expr", expr);
        let ds = delta_star(&f, opts.degree)?;
        for n in 0..=opts.degree {
            out.row(vec![("n", json!(n)), ("delta_n_at_zero", json!(ds.set(n).len()))]);
        }
        let mut r = Report::new("delta-star");
        r.record_case();
        out.set_report(r);
    }
    if let Some(expr) = &opts.roundtrip {
        acted = true;
        let f = realize_expr(expr, cfg)?.functor;
        f.require_taut()?;
        out.param("expr", expr);
        out.set_report(roundtrip_check(&f, opts.degree, cfg.bound.min(4))?);
    }
    if !acted {
        bail!("newton requires one of --sum <file>, --delta-star <expr>, --roundtrip <expr>");
    }
    Ok(out)
}

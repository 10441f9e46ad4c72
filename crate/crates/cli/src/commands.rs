use crate::{Args, Command, Failure};
use geotool_core::initial_data::{dominant_energy_report_on, energy_density, momentum_norm, InitialDataSet};
use geotool_core::jang::{boundary_function_f, scalar_condition_check, solve_jang, DomainKind};
use geotool_core::mass::{mass_report, MassReport};
use geotool_core::scenario::{parse_range, parse_sweep, Quantity, Scenario};
use geotool_core::spin::{conformal_bound_check, revolution_dirac_spectrum, RevolutionDiracProblem};
use geotool_core::surface::{
    classify, comparison_h0, null_expansions, surface_report, trace_sigma_k, CausalClass, Classification, ComparisonReport,
    NullExpansionField, SurfaceGeometry, SurfaceReport,
};
use geotool_core::{GeoError, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::path::Path;

/// `value >= bound`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound, pass: value >= bound }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

#[derive(Default)]
pub struct Outcome {
    pub command: String,
    pub scenario: String,
    pub sections: Map<String, Value>,
    pub checks: Vec<Check>,
    pub skipped: Vec<String>,
    pub table: Option<String>,
    pub solution: Option<Vec<u8>>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn report_json(&self) -> Value {
        json!({
            "command": self.command,
            "scenario": self.scenario,
            "pass": self.pass(),
            "checks": self.checks,
            "skipped": self.skipped,
            "sections": self.sections,
        })
    }

    fn section(&mut self, name: &str, v: impl Serialize) {
        self.sections.insert(name.to_string(), serde_json::to_value(v).expect("section serializes"));
    }
}

fn num(v: f64) -> String {
    format!("{v:.15e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn class_name<T: Serialize>(c: &T) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn dispatch(args: &Args, mut scn: Scenario, base: &Path) -> std::result::Result<Outcome, Failure> {
    if let Some(n) = args.resolution {
        let nm = &mut scn.numerics;
        match args.command {
            Command::Constraints => nm.constraint_resolution = n,
            Command::Jang => nm.jang_resolution = n,
            Command::Dirac => nm.dirac_resolution = n,
            Command::Surface | Command::Masses | Command::Verify | Command::Sweep => nm.surface_resolution = n,
        }
    }
    if let Some(t) = args.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(GeoError::Parse(format!("--tol {t} must be a non-negative number")).into());
        }
        scn.numerics.tolerance = Quantity::new(t);
    }
    let mut out = Outcome {
        command: format!("{:?}", args.command).to_lowercase(),
        scenario: scn.name.clone(),
        ..Default::default()
    };
    let ids = scn.initial_data(base)?;
    match args.command {
        Command::Constraints => out.table = Some(constraints(&scn, &ids, &mut out)?),
        Command::Surface => {
            let sd = SurfaceData::evaluate(&scn, &ids)?;
            sd.record(&mut out);
            out.table = Some(sd.table());
        }
        Command::Jang => jang(&scn, &ids, &mut out)?,
        Command::Masses => match &args.sweep {
            Some(spec) => {
                let (name, values) = parse_sweep(spec)?;
                out.table = Some(mass_sweep(&scn, base, &name, &values, &mut out)?);
            }
            None => {
                let sd = SurfaceData::evaluate(&scn, &ids)?;
                masses(&scn, &sd, &mut out)?;
                out.table = Some(sd.table());
            }
        },
        Command::Dirac => out.table = Some(dirac(&scn, &ids, &mut out)?),
        Command::Verify => verify(&scn, &ids, &mut out)?,
        Command::Sweep => {
            let (name, values) = match (&args.param, &args.range, &args.sweep) {
                (Some(p), Some(r), None) => (p.clone(), parse_range(r)?),
                (None, None, Some(s)) => parse_sweep(s)?,
                _ => return Err(GeoError::Parse("sweep needs --param NAME --range a:b:n, or --sweep NAME=a:b:n".into()).into()),
            };
            out.table = Some(family_sweep(&scn, base, &name, &values, &mut out)?);
        }
    }
    Ok(out)
}

fn constraints(scn: &Scenario, ids: &InitialDataSet, out: &mut Outcome) -> Result<String> {
    let grid = scn.constraint_grid(ids)?;
    let rep = dominant_energy_report_on(ids, &grid)?;
    out.checks.push(Check::at_least("dominant_energy", rep.min_margin, -rep.tolerance));
    out.section("constraints", &rep);
    let rows: Vec<(f64, f64)> = (0..grid.node_count())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            Ok((energy_density(ids, &x)?, momentum_norm(ids, &x)?))
        })
        .collect::<Result<_>>()?;
    let mut t = String::from("x,y,z,mu,j_norm,margin\n");
    for (k, (mu, j)) in rows.iter().enumerate() {
        let x = grid.point(k);
        let _ = writeln!(t, "{},{},{},{},{},{}", num(x[0]), num(x[1]), num(x[2]), num(*mu), num(*j), num(mu - j));
    }
    Ok(t)
}

struct SurfaceData {
    geo: SurfaceGeometry,
    domain_points: Vec<[f64; 2]>,
    n: NullExpansionField,
    cmp: Option<ComparisonReport>,
    class: Classification,
    report: SurfaceReport,
}

impl SurfaceData {
    fn evaluate(scn: &Scenario, ids: &InitialDataSet) -> Result<Self> {
        let s = scn
            .surface()?
            .ok_or_else(|| GeoError::Infeasible(format!("scenario {:?} has no surface", scn.name)))?;
        let geo = SurfaceGeometry::compute(&s, &ids.metric)?;
        let tr = trace_sigma_k(&geo, &ids.extrinsic)?;
        let n = null_expansions(&geo, &geo.mean_curvature, &tr);
        let cmp = match scn.comparison(&s, &geo)? {
            Some(e) => Some(comparison_h0(&e, &s, &geo)?),
            None => None,
        };
        // classification threshold relative to the curvature scale
        let (h_lo, h_hi) = geo.scan_range(&n.mean_curvature);
        let (k_lo, k_hi) = geo.scan_range(&n.trace_sigma_k);
        let scale = [h_lo, h_hi, k_lo, k_hi].iter().map(|v| v.abs()).fold(1.0 / scn.extent(), f64::max);
        let tol = scn.tolerance() * scale;
        let class = classify(&n, tol);
        let report = surface_report(&scn.name, &geo, &n, tol, cmp.as_ref());
        let domain_points = (0..s.domain.node_count()).map(|k| {
            let p = s.domain.point(k);
            [p[0], p[1]]
        });
        Ok(SurfaceData { domain_points: domain_points.collect(), geo, n, cmp, class, report })
    }

    fn record(&self, out: &mut Outcome) {
        out.section("surface", &self.report);
        if let Some(d) = self.report.dichotomy {
            out.checks.push(Check::holds(format!("mean_curvature_dichotomy ({})", class_name(&d)), d != geotool_core::surface::Dichotomy::Violation));
        }
    }

    fn table(&self) -> String {
        let mut t = String::from("s1,s2,x,y,z,H,trK,theta_plus,theta_minus,norm_h_sq,h0,class\n");
        for k in 0..self.geo.len() {
            let (p, x) = (self.domain_points[k], self.geo.positions[k]);
            let class = self.class.per_point[k].map(|c| class_name(&c)).unwrap_or_else(|| "unscanned".into());
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                num(p[0]),
                num(p[1]),
                num(x[0]),
                num(x[1]),
                num(x[2]),
                num(self.n.mean_curvature[k]),
                num(self.n.trace_sigma_k[k]),
                num(self.n.theta_plus[k]),
                num(self.n.theta_minus[k]),
                num(self.n.norm_h_sq[k]),
                opt(self.cmp.as_ref().map(|c| c.h0[k])),
                class
            );
        }
        t
    }

    /// Masses need an untrapped surface and an isometric comparison.
    fn mass_inputs(&self, scn: &Scenario) -> Result<&ComparisonReport> {
        if self.report.classification != CausalClass::Untrapped {
            return Err(GeoError::Infeasible(format!(
                "surface of {:?} is classified {}; masses need an untrapped surface",
                scn.name,
                class_name(&self.report.classification)
            )));
        }
        let cmp = self.cmp.as_ref().ok_or_else(|| {
            GeoError::Infeasible(format!("scenario {:?} has no comparison immersion; set `comparison`", scn.name))
        })?;
        if cmp.isometry_defect > 1e-9 * self.geo.area() {
            return Err(GeoError::NonIsometric { defect: cmp.isometry_defect });
        }
        Ok(cmp)
    }

    fn masses(&self, scn: &Scenario) -> Result<MassReport> {
        let cmp = self.mass_inputs(scn)?;
        Ok(mass_report(&self.geo, &self.n, &cmp.h0))
    }
}

fn mass_checks(scn: &Scenario, m: &MassReport, label: &str, out: &mut Outcome) {
    let s = &m.inputs_summary;
    let scale = s.h_max.abs().max(s.h0_max.abs());
    if let Some(margin) = m.hmr_margin {
        out.checks.push(Check::at_least(format!("hmr_margin{label}"), margin, -scn.tolerance() * s.area * scale));
    }
    if let Some(ok) = m.implication_holds {
        out.checks.push(Check::holds(format!("liu_yau_implication{label}"), ok));
    }
}

fn masses(scn: &Scenario, sd: &SurfaceData, out: &mut Outcome) -> Result<()> {
    let m = sd.masses(scn)?;
    sd.record(out);
    mass_checks(scn, &m, "", out);
    let closed = scn.closed_form_mass();
    out.section(
        "masses",
        json!({
            "report": m,
            "closed_form_m_hmr": closed,
            "rel_err": closed.zip(m.m_hmr).map(|(c, q)| (q - c).abs() / c.abs()),
        }),
    );
    Ok(())
}

fn mass_sweep(scn: &Scenario, base: &Path, name: &str, values: &[f64], out: &mut Outcome) -> Result<String> {
    let mut t = format!("{name},m_BY,m_L,m_HMR,closed_form,rel_err\n");
    let mut rows = Vec::new();
    for &v in values {
        let s = scn.with_parameter(name, v)?;
        let ids = s.initial_data(base)?;
        let m = SurfaceData::evaluate(&s, &ids)?.masses(&s)?;
        mass_checks(&s, &m, &format!("[{name}={v}]"), out);
        let closed = s.closed_form_mass();
        let rel = closed.zip(m.m_hmr).map(|(c, q)| (q - c).abs() / c.abs());
        let _ = writeln!(t, "{},{},{},{},{},{}", num(v), num(m.m_by), opt(m.m_l), opt(m.m_hmr), opt(closed), opt(rel));
        rows.push(json!({ name: v, "m_BY": m.m_by, "m_L": m.m_l, "m_HMR": m.m_hmr, "closed_form": closed, "rel_err": rel }));
    }
    out.section("sweep", rows);
    Ok(t)
}

fn family_sweep(scn: &Scenario, base: &Path, name: &str, values: &[f64], out: &mut Outcome) -> Result<String> {
    let mut t = format!(
        "{name},dec_min_margin,area,h_min,h_max,theta_plus_min,theta_plus_max,theta_minus_min,theta_minus_max,classification,m_BY,m_L,m_HMR,hmr_margin\n"
    );
    for &v in values {
        let s = scn.with_parameter(name, v)?;
        let ids = s.initial_data(base)?;
        let dec = dominant_energy_report_on(&ids, &s.constraint_grid(&ids)?)?;
        out.checks.push(Check::at_least(format!("dominant_energy[{name}={v}]"), dec.min_margin, -dec.tolerance));
        let _ = write!(t, "{},{}", num(v), num(dec.min_margin));
        if s.surface.is_none() {
            t.push_str(",,,,,,,,,,,,\n");
            continue;
        }
        let sd = SurfaceData::evaluate(&s, &ids)?;
        let r = &sd.report;
        let _ = write!(
            t,
            ",{},{},{},{},{},{},{},{}",
            num(r.area),
            num(r.h_min),
            num(r.h_max),
            num(r.theta_plus_min),
            num(r.theta_plus_max),
            num(r.theta_minus_min),
            num(r.theta_minus_max),
            class_name(&r.classification)
        );
        match sd.masses(&s) {
            Ok(m) => {
                mass_checks(&s, &m, &format!("[{name}={v}]"), out);
                let _ = writeln!(t, ",{},{},{},{}", num(m.m_by), opt(m.m_l), opt(m.m_hmr), opt(m.hmr_margin));
            }
            Err(GeoError::Infeasible(_) | GeoError::NonIsometric { .. }) => t.push_str(",,,,\n"),
            Err(e) => return Err(e),
        }
    }
    Ok(t)
}

fn jang(scn: &Scenario, ids: &InitialDataSet, out: &mut Outcome) -> Result<()> {
    let domain = scn
        .jang_domain()?
        .ok_or_else(|| GeoError::Infeasible(format!("scenario {:?} has no Jang domain", scn.name)))?;
    let ball = matches!(domain.kind, DomainKind::Ball { .. });
    let sol = solve_jang(domain, ids, &scn.jang_options())?;
    if !sol.converged {
        return Err(GeoError::NotConverged(format!("Jang residual {:e} above {:e}", sol.residual_norm, sol.tolerance)));
    }
    let tol = scn.tolerance();
    let sc = scalar_condition_check(&sol, ids, 0.0)?;
    out.checks.push(Check::at_least("scalar_condition", sc.min_margin, -tol * sc.max_abs_term.max(1.0)));
    out.section(
        "jang",
        json!({
            "nodes": sol.domain.chart.nodes(),
            "converged": sol.converged,
            "iterations": sol.iterations,
            "continuation_iterations": sol.continuation_iterations,
            "residual_norm": sol.residual_norm,
            "tolerance": sol.tolerance,
            "scale": sol.scale,
            "max_abs_u": sol.u.iter().map(|v| v.abs()).fold(0.0, f64::max),
            "scalar_condition": sc,
        }),
    );
    if ball {
        let b = boundary_function_f(&sol, ids)?;
        if b.untrapped {
            // the two routes to F differ by the discretization error
            let slack = tol * b.norm_h_max + b.route_disagreement;
            out.checks.push(Check::at_least("boundary_F_minus_norm_H", b.margin, -slack));
        } else {
            out.skipped.push("boundary_F_minus_norm_H: outer sphere is not untrapped".into());
        }
        let mut t = String::from("theta,phi,F_direct,F_identity_plus,F_identity_minus,sigma,H,trK,norm_h\n");
        for k in 0..b.angles.len() {
            let _ = writeln!(
                t,
                "{},{},{},{},{},{},{},{},{}",
                num(b.angles[k][0]),
                num(b.angles[k][1]),
                num(b.f_direct[k]),
                num(b.f_identity[0][k]),
                num(b.f_identity[1][k]),
                b.sigma[k],
                num(b.mean_curvature[k]),
                num(b.trace_sigma_k[k]),
                num(b.norm_h[k])
            );
        }
        out.table = Some(t);
        out.section("boundary", b.summary());
    } else {
        out.skipped.push("boundary_F_minus_norm_H: boundary function needs a ball domain".into());
    }
    out.solution = Some(sol.to_bytes());
    Ok(())
}

fn dirac(scn: &Scenario, ids: &InitialDataSet, out: &mut Outcome) -> Result<String> {
    let profile = scn.dirac_profile()?;
    let (mm, res) = (scn.numerics.dirac_max_mode.value(), scn.numerics.dirac_resolution);
    let tol = scn.tolerance();
    let spec = revolution_dirac_spectrum(&RevolutionDiracProblem::new(profile.clone(), mm, res), 8)?;
    let l1 = spec.lambda1();
    // second-order scheme: the half-resolution difference bounds the error
    let coarse = revolution_dirac_spectrum(&RevolutionDiracProblem::new(profile.clone(), mm, res / 2), 1)?.lambda1();
    let est = (l1 - coarse).abs();
    let sd = SurfaceData::evaluate(scn, ids)?;
    // poles included: on spheroids the smallest |H| sits there
    let inf_norm_h_sq = sd.n.norm_h_sq.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min).max(0.0);
    let lhs = l1 * l1 - 0.25 * inf_norm_h_sq;
    out.checks.push(Check::at_least("lambda1_sq_minus_quarter_inf_norm_H_sq", lhs, -(tol * l1 * l1 + 2.0 * l1 * est)));
    let mut section = json!({
        "lambda1": l1,
        "lambda1_error_estimate": est,
        "inf_norm_h_sq": inf_norm_h_sq,
        "symmetry_defect": spec.symmetry_defect(),
        "spectrum": spec.entries,
    });
    match scn.comparison_mean_curvature_profile() {
        Some(f) => {
            let b = conformal_bound_check(profile.clone(), f.clone(), mm, res)?;
            let bc = conformal_bound_check(profile, f, mm, res / 2)?;
            let est = (b.lambda1 - bc.lambda1).abs();
            out.checks.push(Check::at_least("conformal_lambda1_minus_half", b.margin, -(tol + est)));
            section["conformal"] = json!({ "lambda1": b.lambda1, "margin": b.margin, "error_estimate": est });
        }
        None => out.skipped.push("conformal_lambda1_minus_half: no closed-form comparison mean curvature".into()),
    }
    out.section("dirac", section);
    Ok(spec.to_csv())
}

fn skippable(e: &GeoError) -> bool {
    matches!(e, GeoError::Infeasible(_) | GeoError::Unsupported(_) | GeoError::NonIsometric { .. })
}

fn verify(scn: &Scenario, ids: &InitialDataSet, out: &mut Outcome) -> Result<()> {
    let dec_table = constraints(scn, ids, out)?;
    out.table = Some(dec_table);
    if scn.surface.is_some() {
        let sd = SurfaceData::evaluate(scn, ids)?;
        match masses(scn, &sd, out) {
            Ok(()) => {}
            Err(e) if skippable(&e) => {
                sd.record(out);
                out.skipped.push(format!("masses: {e}"));
            }
            Err(e) => return Err(e),
        }
        out.table = Some(sd.table());
        match dirac(scn, ids, out) {
            Ok(_) => {}
            Err(e) if skippable(&e) => out.skipped.push(format!("dirac: {e}")),
            Err(e) => return Err(e),
        }
    } else {
        out.skipped.push("surface, masses, dirac: scenario has no surface".into());
    }
    if scn.domain.is_some() {
        let table = out.table.take();
        jang(scn, ids, out)?;
        // keep the surface table; the boundary table belongs to `jang`
        out.table = table;
    } else {
        out.skipped.push("jang: scenario has no domain".into());
    }
    Ok(())
}

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;
use walkzeta::closed_forms::{qw_log_zeta_closed, rw_log_zeta_closed};
use walkzeta::geometry::amoeba::{amoeba_complement_components, amoeba_points, BoxSpec, RasterOptions};
use walkzeta::geometry::polytope::{newton_polytope, polytope_svg};
use walkzeta::geometry::tropical::{complex_svg, duality_check, trop_hypersurface, tropicalize};
use walkzeta::io::{csv_line, fmt_f64};
use walkzeta::ronkin::{correspondence_check, ronkin_eval, surface_csv, RonkinEvaluation, WalkFamily};
use walkzeta::simulator::{default_norm_power, evolve, measure, measure_csv, return_trace, Domain, WalkState, STEP_CAP};
use walkzeta::verify::run_all;
use walkzeta::walk::TorusSpec;
use walkzeta::zeta::{c_r_finite, c_r_limit_all, finite_zeta, log_zeta};

use crate::args::{parse_grid, Common, Dump, Format};
use crate::CliError;

/// Series length used for the random walk closed forms.
const RW_SERIES_TERMS: u32 = 200;

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        let sign = if z.im < 0.0 { "" } else { "+" };
        format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im))
    }
}

fn no_format(cmd: &str, f: Format) -> CliError {
    CliError::Config(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn json_lines(v: serde_json::Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn zeta_header() -> String {
    "model,d,N|inf,u,value,diag_nodes,diag_err".to_string()
}

pub fn zeta(c: &Common) -> Result<String, CliError> {
    let coin = c.coin()?;
    let n = c.n.ok_or_else(|| CliError::Config("zeta needs --N".into()))?;
    let torus = TorusSpec::new(coin.d(), n)?;
    let rows: Vec<_> = c
        .u_values()?
        .into_iter()
        .map(|u| finite_zeta(&coin, &torus, u))
        .collect::<Result<_, _>>()?;
    match c.format {
        Format::Csv => {
            let mut out = zeta_header();
            out.push('\n');
            for r in &rows {
                out.push_str(&csv_line([
                    c.model_name().to_string(),
                    coin.d().to_string(),
                    n.to_string(),
                    fmt_f64(r.u),
                    fmt_c(r.value),
                    r.nodes.to_string(),
                    fmt_f64(r.err),
                ]));
            }
            Ok(out)
        }
        Format::Json => Ok(json_lines(json!({"model": c.model_name(), "d": coin.d(), "N": n, "rows": rows}))),
        f => Err(no_format("zeta", f)),
    }
}

fn closed_form(family: Option<WalkFamily>, u: f64) -> Option<f64> {
    match family? {
        WalkFamily::Rw { d } => rw_log_zeta_closed(d, u, RW_SERIES_TERMS).ok().map(|r| r.value),
        WalkFamily::QwM { xi } => qw_log_zeta_closed(xi, u, walkzeta::walk::ShiftType::M).ok(),
        WalkFamily::QwF { xi } => qw_log_zeta_closed(xi, u, walkzeta::walk::ShiftType::F).ok(),
    }
}

pub fn logzeta(c: &Common) -> Result<String, CliError> {
    let coin = c.coin()?;
    let family = c.family()?;
    let quad = c.quad()?;
    let rows: Vec<_> = c
        .u_values()?
        .into_iter()
        .map(|u| Ok((log_zeta(&coin, u, &quad)?, closed_form(family, u))))
        .collect::<Result<_, CliError>>()?;
    match c.format {
        Format::Csv => {
            let mut out = zeta_header();
            out.push_str(",closed_form\n");
            for (r, cf) in &rows {
                out.push_str(&csv_line([
                    c.model_name().to_string(),
                    coin.d().to_string(),
                    "inf".to_string(),
                    fmt_f64(r.u),
                    fmt_c(r.value),
                    r.nodes.to_string(),
                    fmt_f64(r.err),
                    cf.map(fmt_f64).unwrap_or_default(),
                ]));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<_> = rows.iter().map(|(r, cf)| json!({"result": r, "closed_form": cf})).collect();
            Ok(json_lines(json!({"model": c.model_name(), "d": coin.d(), "N": "inf", "rows": rows})))
        }
        f => Err(no_format("logzeta", f)),
    }
}

pub fn cr(c: &Common) -> Result<String, CliError> {
    let coin = c.coin()?;
    let limits = c_r_limit_all(&coin, c.r_max, &c.quad()?)?;
    let torus = c.n.map(|n| TorusSpec::new(coin.d(), n)).transpose()?;
    let mut rows = Vec::new();
    for (i, lim) in limits.iter().enumerate() {
        let r = i + 1;
        let fin = torus.as_ref().map(|t| c_r_finite(&coin, t, r)).transpose()?;
        let tr = if r <= STEP_CAP { Some(return_trace(&coin, r)?) } else { None };
        rows.push((r, fin, *lim, tr));
    }
    match c.format {
        Format::Csv => {
            let mut out = String::from("r,finite,limit,return_trace\n");
            for (r, fin, lim, tr) in rows {
                out.push_str(&csv_line([
                    r.to_string(),
                    fin.map(fmt_c).unwrap_or_default(),
                    fmt_c(lim),
                    tr.map(fmt_c).unwrap_or_default(),
                ]));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .into_iter()
                .map(|(r, fin, lim, tr)| json!({"r": r, "finite": fin, "limit": lim, "return_trace": tr}))
                .collect();
            Ok(json_lines(json!({"model": c.model_name(), "N": c.torus_label(), "rows": rows})))
        }
        f => Err(no_format("cr", f)),
    }
}

fn grid_points(k: usize, half: f64, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    if n == 0 {
        return Err(CliError::Config("--resolution must be >= 1".into()));
    }
    if !(half.is_finite() && half > 0.0) {
        return Err(CliError::Config("--box must be positive".into()));
    }
    let total = n
        .checked_pow(k as u32)
        .filter(|&t| t <= 1 << 22)
        .ok_or_else(|| CliError::Config(format!("grid of {n}^{k} points is too large")))?;
    let axis: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        parse_grid(&format!("{}:{}:{n}", -half, half))?
    };
    Ok((0..total)
        .map(|mut f| {
            let mut x = vec![0.0; k];
            for j in (0..k).rev() {
                x[j] = axis[f % n];
                f /= n;
            }
            x
        })
        .collect())
}

pub fn ronkin(c: &Common) -> Result<String, CliError> {
    let p = c.polynomial()?;
    let quad = c.quad()?;
    let points = grid_points(p.k(), c.box_half, c.resolution)?;
    let evals: Vec<RonkinEvaluation> = points
        .par_iter()
        .map(|x| ronkin_eval(&p, x, &quad))
        .collect::<Result<_, _>>()?;
    match c.format {
        Format::Csv => Ok(surface_csv(&evals)),
        Format::Json => Ok(json_lines(json!({"k": p.k(), "evaluations": evals}))),
        f => Err(no_format("ronkin", f)),
    }
}

pub fn correspond(c: &Common) -> Result<String, CliError> {
    let family = c
        .family()?
        .ok_or_else(|| CliError::Config("correspond needs --model rw, qw-m or qw-f".into()))?;
    let quad = c.quad()?;
    let rows: Vec<_> = c
        .u_values()?
        .into_iter()
        .map(|u| correspondence_check(family, u, &quad))
        .collect::<Result<_, _>>()?;
    match c.format {
        Format::Csv => {
            let mut out = String::from("model,d,u,l,r0,diff,l_nodes,r_nodes,singular_flag\n");
            for r in &rows {
                out.push_str(&csv_line([
                    c.model_name().to_string(),
                    family.dim().to_string(),
                    fmt_f64(r.u),
                    fmt_f64(r.l),
                    fmt_f64(r.r0),
                    fmt_f64(r.diff),
                    r.l_nodes.to_string(),
                    r.r_nodes.to_string(),
                    r.singular_flag.to_string(),
                ]));
            }
            Ok(out)
        }
        Format::Json => Ok(json_lines(json!({"rows": rows}))),
        f => Err(no_format("correspond", f)),
    }
}

pub fn amoeba(c: &Common) -> Result<String, CliError> {
    let p = c.polynomial()?;
    if c.resolution < 2 {
        return Err(CliError::Config("--resolution must be >= 2".into()));
    }
    if !(c.box_half.is_finite() && c.box_half > 0.0) {
        return Err(CliError::Config("--box must be positive".into()));
    }
    let opts = RasterOptions {
        quad: c.quad()?,
        ..RasterOptions::default()
    };
    match c.format {
        Format::Csv => {
            let cloud = amoeba_points(&p, -c.box_half, c.box_half, c.resolution, c.resolution)?;
            let mut out = String::from("x,y\n");
            for pt in &cloud.points {
                out.push_str(&csv_line(pt.iter().map(|v| fmt_f64(*v))));
            }
            Ok(out)
        }
        Format::Json => {
            let r = amoeba_complement_components(&p, BoxSpec::square(c.box_half), c.resolution, c.resolution, &opts)?;
            let mut s = r.to_json();
            s.push('\n');
            Ok(s)
        }
        Format::Svg => {
            let r = amoeba_complement_components(&p, BoxSpec::square(c.box_half), c.resolution, c.resolution, &opts)?;
            Ok(r.to_svg())
        }
    }
}

pub fn tropical(c: &Common) -> Result<String, CliError> {
    let p = c.polynomial()?;
    let cx = trop_hypersurface(&tropicalize(&p))?;
    match c.format {
        Format::Json => {
            let complex: serde_json::Value =
                serde_json::from_str(&cx.to_json()).map_err(|e| CliError::Config(e.to_string()))?;
            let duality = if p.k() <= 2 {
                Some(duality_check(&p, c.resolution.min(100), c.box_half, c.seed)?)
            } else {
                None
            };
            Ok(json_lines(json!({"complex": complex, "duality": duality})))
        }
        Format::Svg => Ok(complex_svg(&cx, c.box_half)?),
        f => Err(no_format("tropical", f)),
    }
}

pub fn newton(c: &Common) -> Result<String, CliError> {
    let p = c.polynomial()?;
    let np = newton_polytope(&p)?;
    match c.format {
        Format::Json => {
            let mut s = np.to_json();
            s.push('\n');
            Ok(s)
        }
        Format::Svg => Ok(polytope_svg(&np)?),
        Format::Csv => {
            let mut out = String::from("kind,point\n");
            for v in &np.vertices {
                out.push_str(&format!("vertex,{}\n", join(v)));
            }
            for v in &np.lattice_points {
                out.push_str(&format!("lattice_point,{}\n", join(v)));
            }
            Ok(out)
        }
    }
}

fn join(v: &[i32]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn simulate(c: &Common) -> Result<String, CliError> {
    let coin = c.coin()?;
    let m = 2 * coin.d();
    let psi0: Vec<Complex64> = match &c.psi0 {
        Some(s) => s
            .split(',')
            .map(|v| Ok(Complex64::new(crate::args::parse_f64(v)?, 0.0)))
            .collect::<Result<_, CliError>>()?,
        None => (0..m).map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect(),
    };
    let domain = match c.n {
        Some(n) => Domain::Torus(TorusSpec::new(coin.d(), n)?),
        None => {
            if c.steps > STEP_CAP {
                return Err(walkzeta::error::Error::CapExceeded {
                    requested: c.steps,
                    cap: STEP_CAP,
                }
                .into());
            }
            Domain::Lattice { d: coin.d(), radius: 0 }
        }
    };
    let mut s = WalkState::delta(domain, &psi0)?;
    for _ in 0..c.steps {
        s = evolve(&s, &coin)?;
    }
    let p = default_norm_power(coin.class());
    match (c.format, c.dump) {
        (Format::Csv, Dump::State) => Ok(s.to_csv()),
        (Format::Csv, Dump::Measure) => Ok(measure_csv(&s, &measure(&s, p)?)),
        (Format::Json, _) => {
            let mu = measure(&s, p)?;
            let sites: Vec<_> = s
                .sites()
                .zip(&mu)
                .map(|((x, v), m)| json!({"site": x, "state": v, "measure": m}))
                .collect();
            let total: f64 = mu.iter().sum();
            Ok(json_lines(json!({"steps": c.steps, "norm_power": p, "total": total, "sites": sites})))
        }
        (f, _) => Err(no_format("simulate", f)),
    }
}

/// Text report and the identifiers of failed checks.
pub fn verify(c: &Common) -> Result<(String, Vec<String>), CliError> {
    let outcomes = run_all();
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    let text = match c.format {
        Format::Json => json_lines(json!({"checks": outcomes, "failed": failed})),
        Format::Csv => {
            let mut out = String::from("id,status,detail\n");
            for o in &outcomes {
                let status = if o.passed { "PASS" } else { "FAIL" };
                out.push_str(&csv_line([o.id.to_string(), status.to_string(), o.detail.replace(',', ";")]));
            }
            out
        }
        f => return Err(no_format("verify", f)),
    };
    Ok((text, failed))
}

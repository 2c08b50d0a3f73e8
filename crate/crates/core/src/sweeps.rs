//! Parameter sweeps over r: per-point branch masses from the simulator,
//! entanglement of the realized resource from the numeric measures, error
//! curves against concurrence or tangle, CSV emission and the crossover
//! locator for the CaseII / CaseIII comparison.

use crate::error::{Error, Result};
use crate::ghz::classify_case;
use crate::protocols::{
    family_protocol, make_resource, resource_concurrences, resource_tangle, residual_formula,
    ResourceFamily,
};
use crate::states::build_canonical_set;
use crate::tensor::TOL_MEASURE;
use serde::Serialize;
use std::io::Write;

/// One sweep point. P1 and P2 are the joint masses of the two successful
/// template outcomes, P3 the fallback mass tracked by the error formulas and
/// `discard` the ancilla-conditioning failure mass, so that
/// P1 + P2 + P3 + discard = 1.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub family: String,
    pub r: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub discard: f64,
    pub c_ab: f64,
    pub c_ac: f64,
    pub c_bc: f64,
    pub tangle: f64,
    pub case: String,
}

/// Point of a parametric error curve: x is the chosen entanglement measure,
/// y the fallback mass P3, both evaluated at a common r.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub family: String,
    pub measure: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    ConcurrenceAb,
    Tangle,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::ConcurrenceAb => "concurrence_AB",
            Measure::Tangle => "tangle",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "concurrence_ab" | "c_ab" | "concurrence" => Ok(Measure::ConcurrenceAb),
            "tangle" | "tau" => Ok(Measure::Tangle),
            other => Err(Error::InvalidParameter(format!("unknown measure '{other}'"))),
        }
    }
}

pub fn r_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_min <= r_max && r_max <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "invalid r range [{r_min}, {r_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter("steps must be at least 2".into()));
    }
    // inclusive grid with `steps` intervals
    Ok((0..=steps)
        .map(|i| r_min + (r_max - r_min) * i as f64 / steps as f64)
        .collect())
}

fn record_at(family: ResourceFamily, r: f64) -> Result<SweepRecord> {
    let set = build_canonical_set();
    let (res, tree) = family_protocol(family, r)?;
    let report =
        crate::locc::run_protocol(family.name(), r, &tree, &set, &res.realized)?;
    let p1 = report.mass_through("M1");
    let p2 = report.mass_through("M2");
    let p3 = report.residual_mass_avg;
    let discard = report.discard_mass_avg;
    let (c_ab, c_ac, c_bc) = resource_concurrences(&res, TOL_MEASURE)?;
    let tangle = resource_tangle(&res, TOL_MEASURE)?;
    let case = match family.ghz_params(r) {
        Some(p) => classify_case(&p, 1e-9).name().to_string(),
        None => "Bipartite".to_string(),
    };
    Ok(SweepRecord {
        family: family.name().to_string(),
        r,
        p1,
        p2,
        p3,
        discard,
        c_ab,
        c_ac,
        c_bc,
        tangle,
        case,
    })
}

/// Sweep a family over an inclusive r grid; every P value comes from the
/// simulator, entanglement columns from the numeric measures.
pub fn sweep(family: ResourceFamily, r_min: f64, r_max: f64, steps: usize) -> Result<Vec<SweepRecord>> {
    r_grid(r_min, r_max, steps)?
        .into_iter()
        .map(|r| record_at(family, r))
        .collect()
}

/// Parametric error curve (measure(r), P3(r)) for a family over an r grid.
pub fn pe_vs_measure(
    family: ResourceFamily,
    measure: Measure,
    r_values: &[f64],
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let res = make_resource(family, r)?;
        let x = match measure {
            Measure::ConcurrenceAb => resource_concurrences(&res, TOL_MEASURE)?.0,
            Measure::Tangle => resource_tangle(&res, TOL_MEASURE)?,
        };
        out.push(CurvePoint {
            family: family.name().to_string(),
            measure: measure.name().to_string(),
            x,
            y: residual_formula(family, r),
        });
    }
    Ok(out)
}

fn fmt(v: f64) -> String {
    // 17 significant digits round-trips f64 exactly and stays diff-stable
    format!("{v:.16e}")
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from("family,r,P1,P2,P3,C_AB,C_AC,C_BC,tangle,case\n");
    for rec in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            rec.family,
            fmt(rec.r),
            fmt(rec.p1),
            fmt(rec.p2),
            fmt(rec.p3),
            fmt(rec.c_ab),
            fmt(rec.c_ac),
            fmt(rec.c_bc),
            fmt(rec.tangle),
            rec.case
        ));
    }
    s
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("family,measure,x,y\n");
    for p in points {
        s.push_str(&format!("{},{},{},{}\n", p.family, p.measure, fmt(p.x), fmt(p.y)));
    }
    s
}

pub fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

/// The five figure data files: sweeps of the two-qubit, CaseII and CaseIII
/// families, then the error-versus-tangle and error-versus-concurrence curves
/// for CaseII and CaseIII. Returns (filename, contents) pairs.
pub fn figure_files(steps: usize) -> Result<Vec<(String, String)>> {
    let r_min = 0.01;
    let grid = r_grid(r_min, 1.0, steps)?;
    let mut out = Vec::with_capacity(5);
    out.push((
        "fig1.csv".to_string(),
        sweep_csv(&sweep(ResourceFamily::BellLike, r_min, 1.0, steps)?),
    ));
    out.push((
        "fig2.csv".to_string(),
        sweep_csv(&sweep(ResourceFamily::CaseII, r_min, 1.0, steps)?),
    ));
    out.push((
        "fig3.csv".to_string(),
        sweep_csv(&sweep(ResourceFamily::CaseIII, r_min, 1.0, steps)?),
    ));
    let mut tangle_pts = pe_vs_measure(ResourceFamily::CaseII, Measure::Tangle, &grid)?;
    tangle_pts.extend(pe_vs_measure(ResourceFamily::CaseIII, Measure::Tangle, &grid)?);
    out.push(("fig4.csv".to_string(), curve_csv(&tangle_pts)));
    let mut cab_pts = pe_vs_measure(ResourceFamily::CaseII, Measure::ConcurrenceAb, &grid)?;
    cab_pts.extend(pe_vs_measure(ResourceFamily::CaseIII, Measure::ConcurrenceAb, &grid)?);
    out.push(("fig5.csv".to_string(), curve_csv(&cab_pts)));
    Ok(out)
}

/// Invert C_AB(r) on its monotone range for a family. The closed forms are
/// quadratics in sqrt(u) whose valid root is the one at or below one.
fn u_from_cab(family: ResourceFamily, c: f64) -> Option<f64> {
    // C = g * t / (1 + t^2) with t = r^2 and family factor g
    let g = match family {
        ResourceFamily::BellLike => 2.0,
        ResourceFamily::CaseII => 2.0_f64.sqrt(),
        ResourceFamily::CaseIII => 1.0,
        ResourceFamily::CaseI => return None,
    };
    if c <= 0.0 || c > g / 2.0 {
        return None;
    }
    let disc = g * g - 4.0 * c * c;
    if disc < 0.0 {
        return None;
    }
    let t = (g - disc.sqrt()) / (2.0 * c);
    Some(t * t)
}

fn p3_at_cab(family: ResourceFamily, c: f64) -> Option<f64> {
    let u = u_from_cab(family, c)?;
    Some(residual_formula(family, u.sqrt().sqrt()))
}

/// Where the CaseII and CaseIII P3-versus-C_AB curves cross: below the
/// returned C_AB the CaseIII curve lies at or under the CaseII curve.
pub fn locate_cab_crossover(tol: f64) -> Option<f64> {
    locate_cab_crossover_scanned(512, tol)
}

/// Same with an explicit scan resolution, for stability checks under grid
/// refinement.
pub fn locate_cab_crossover_scanned(scan: usize, tol: f64) -> Option<f64> {
    let f = |c: f64| -> Option<f64> {
        Some(p3_at_cab(ResourceFamily::CaseII, c)? - p3_at_cab(ResourceFamily::CaseIII, c)?)
    };
    bisect_sign_change_scanned(f, 1e-6, 0.5 - 1e-9, scan, tol)
}

/// Same for the P3-versus-tangle curves.
pub fn locate_tangle_crossover(tol: f64) -> Option<f64> {
    // numeric tangles: CaseII tau = 2u/(1+u)^2, CaseIII tau = u/(1+u)^2
    let u_from_tau = |tau: f64, scale: f64| -> Option<f64> {
        // tau = scale * u / (1+u)^2  =>  tau u^2 + (2 tau - scale) u + tau = 0
        if tau <= 0.0 {
            return None;
        }
        let a = tau;
        let b = 2.0 * tau - scale;
        let disc = b * b - 4.0 * a * tau;
        if disc < 0.0 {
            return None;
        }
        let u = (-b - disc.sqrt()) / (2.0 * a);
        (u > 0.0 && u <= 1.0).then_some(u)
    };
    let f = |tau: f64| -> Option<f64> {
        let u2 = u_from_tau(tau, 2.0)?;
        let u3 = u_from_tau(tau, 1.0)?;
        Some(
            residual_formula(ResourceFamily::CaseII, u2.sqrt().sqrt())
                - residual_formula(ResourceFamily::CaseIII, u3.sqrt().sqrt()),
        )
    };
    bisect_sign_change(f, 1e-6, 0.25 - 1e-9, tol)
}

fn bisect_sign_change<F: Fn(f64) -> Option<f64>>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<f64> {
    bisect_sign_change_scanned(f, lo, hi, 512, tol)
}

fn bisect_sign_change_scanned<F: Fn(f64) -> Option<f64>>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    tol: f64,
) -> Option<f64> {
    // scan for a sign change, then bisect
    let mut prev_x = lo;
    let mut prev = f(lo)?;
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = f(x)?;
        if prev == 0.0 {
            return Some(prev_x);
        }
        if prev.signum() != v.signum() {
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev;
            while b - a > tol {
                let m = 0.5 * (a + b);
                let fm = f(m)?;
                if fm == 0.0 {
                    return Some(m);
                }
                if fa.signum() != fm.signum() {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = v;
        prev_x = x;
    }
    None
}

//! JSON, CSV and table renderings of core results.
//!
//! Every JSON document carries `"schema": "covergeo/v1"` and the length
//! unit. Object keys come out sorted, so equal inputs give equal bytes.

use std::fmt::Write as _;

use covergeo_core::bounds::CoverageBound;
use covergeo_core::flatnorm::{FillInReport, FlatNormResult, LambdaThreshold, PipelineOutcome, ReachReport};
use covergeo_core::montecarlo::{CoverageMode, TrialReport};
use covergeo_core::partition::{AlmostPartitionCertificate, GoodPartitionCertificate, Partition};
use covergeo_core::GridSet;
use serde_json::{json, Value};

pub const SCHEMA: &str = "covergeo/v1";
pub const DEFAULT_UNIT: &str = "length";

/// Wraps a document body with the schema tag, its kind and the unit.
pub fn document(kind: &str, unit: &str, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("report bodies are objects");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("kind".into(), json!(kind));
    obj.insert("unit".into(), json!(unit));
    body
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn set_summary(set: &GridSet) -> Value {
    let lat = set.lattice();
    let n = lat.ndim();
    json!({
        "ndim": n,
        "dims": &lat.dims()[..n],
        "h": lat.h(),
        "origin": &lat.origin()[..n],
        "cells": set.count(),
        "measure": set.measure(),
        "perimeter": covergeo_core::measure::perimeter(set),
    })
}

pub fn partition_json(p: &Partition) -> Value {
    let regions: Vec<Value> = p
        .regions
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "cells": r.cells,
                "measure": r.measure,
                "diameter": r.diameter,
                "seed_index": r.seed_index,
            })
        })
        .collect();
    json!({
        "delta": p.delta,
        "cube_side": p.ell,
        "fattening": p.fattening,
        "diameter_cap": p.diameter_cap(),
        "removed_measure": p.removed_measure,
        "region_count": p.len(),
        "regions": regions,
    })
}

pub fn good_certificate_json(c: &GoodPartitionCertificate) -> Value {
    let failed: Vec<Value> = c
        .regions
        .iter()
        .filter(|r| !(r.measure_ok && r.diameter_ok))
        .map(|r| json!({"id": r.id, "measure": r.measure, "diameter": r.diameter}))
        .collect();
    json!({
        "delta": c.delta,
        "volume_floor": c.volume_floor,
        "snapped_floor": c.snapped_floor,
        "removed_measure": c.removed_measure,
        "effective_floor": c.effective_floor,
        "measure_slack": c.measure_slack,
        "diameter_cap": c.diam_cap,
        "diameter_slack": c.diameter_slack,
        "min_measure": c.min_measure(),
        "max_diameter": c.max_diameter(),
        "labeling_consistent": c.labeling_consistent,
        "failed_regions": failed,
        "verdict": c.verdict,
    })
}

pub fn almost_certificate_json(c: &AlmostPartitionCertificate) -> Value {
    json!({
        "alpha": c.alpha,
        "measure_a": c.measure_a,
        "measure_e": c.measure_e,
        "coverage_ratio": c.coverage_ratio,
        "subset": c.subset,
        "verdict": c.verdict,
        "literal_verdict": c.literal_verdict,
    })
}

pub fn bound_json(b: &CoverageBound) -> Value {
    json!({
        "bound": b.kind.name(),
        "terms": b.m,
        "ndim": b.n,
        "delta": b.delta,
        "normalizing_measure": b.measure_e,
        "removed_measure": b.measure_removed,
        "coefficient": b.coefficient,
    })
}

/// Fixed-width table of bound values, one column per bound.
pub fn bound_table(bounds: &[&CoverageBound], ns: &[u64]) -> String {
    let mut s = format!("{:>12}", "N");
    for b in bounds {
        write!(s, " {:>16}", b.kind.name()).unwrap();
    }
    s.push('\n');
    for &n in ns {
        write!(s, "{n:>12}").unwrap();
        for b in bounds {
            write!(s, " {:>16.10}", b.evaluate(n)).unwrap();
        }
        s.push('\n');
    }
    s
}

fn mode_json(mode: CoverageMode) -> Value {
    match mode {
        CoverageMode::Full => json!({"mode": "full"}),
        CoverageMode::Almost(alpha) => json!({"mode": "almost", "alpha": alpha}),
    }
}

pub fn trial_report_json(r: &TrialReport) -> Value {
    json!({
        "samples": r.samples,
        "radius": r.radius,
        "mode": mode_json(r.mode),
        "seed": r.seed,
        "generator": covergeo_core::rng::GENERATOR_ID,
        "trials": r.trials,
        "successes": r.successes,
        "conservative_successes": r.conservative_successes,
        "p_hat": r.p_hat,
        "wilson_lo": r.wilson_lo,
        "wilson_hi": r.wilson_hi,
        "bound": r.bound,
        "verdict": r.verdict,
    })
}

/// `N,bound,p_hat,lo,hi,verdict` rows for plotting.
pub fn ladder_csv(reports: &[TrialReport]) -> String {
    let mut s = String::from("N,bound,p_hat,lo,hi,verdict\n");
    for r in reports {
        let bound = r.bound.map(|b| b.to_string()).unwrap_or_default();
        let verdict = match r.verdict {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "",
        };
        writeln!(s, "{},{},{},{},{},{}", r.samples, bound, r.p_hat, r.wilson_lo, r.wilson_hi, verdict).unwrap();
    }
    s
}

pub fn reach_json(r: &ReachReport) -> Value {
    json!({
        "c_hat": r.c_hat,
        "required": r.required,
        "sigma_radius": r.sigma_radius,
        "complement_radius": r.complement_radius,
        "verdict": r.verdict,
    })
}

pub fn flatnorm_json(res: &FlatNormResult, reach: Option<&ReachReport>) -> Value {
    json!({
        "lambda": res.lambda,
        "energy": res.energy,
        "perimeter": res.perim_sigma,
        "sym_diff": res.sym_diff_measure,
        "sigma_measure": res.sigma.measure(),
        "sigma_empty": res.sigma.is_empty(),
        "input_perimeter": res.input_perimeter,
        "input_measure": res.input_measure,
        "verdicts": {
            "reach": reach.map(reach_json),
            "beats_empty": res.energy <= res.lambda * res.input_measure,
            "beats_input": res.energy <= res.input_perimeter,
        },
    })
}

pub fn threshold_json(t: &LambdaThreshold) -> Value {
    json!({
        "lambda": t.lambda,
        "lo": t.lo,
        "hi": t.hi,
        "evaluations": t.evaluations,
    })
}

pub fn fill_in_json(r: &FillInReport) -> Value {
    json!({
        "lambda": r.lambda,
        "measure_a": r.measure_a,
        "margin": r.margin,
        "stability_radius_u": r.stability_radius_u,
        "sym_diff_to_u": r.sym_diff_to_u,
        "tolerance": r.tolerance,
        "verdict": r.verdict,
        "minimizer": flatnorm_json(&r.result, None),
    })
}

pub fn pipeline_json(o: &PipelineOutcome, delta: f64) -> Value {
    json!({
        "lambda": o.flat.lambda,
        "delta": delta,
        "threshold": threshold_json(&o.threshold),
        "minimizer": flatnorm_json(&o.flat, None),
        "measure_a": o.a.measure(),
        "alpha": o.alpha,
        "regions": o.partition.len(),
        "good": good_certificate_json(&o.good),
        "almost": almost_certificate_json(&o.almost),
        "bound": bound_json(&o.bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use covergeo_core::bounds::bound_reach;

    #[test]
    fn documents_are_tagged() {
        let v = document("bound", "mm", json!({"x": 1}));
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["kind"], "bound");
        assert_eq!(v["unit"], "mm");
        let text = to_pretty(&v);
        assert!(text.ends_with("}\n"));
        // Sorted keys.
        assert!(text.find("\"kind\"").unwrap() < text.find("\"schema\"").unwrap());
    }

    #[test]
    fn table_columns_line_up() {
        let b = bound_reach(10, 2, 4.0, 100.0).unwrap();
        let t = bound_table(&[&b, &b], &[1, 1000, 123_456]);
        let widths: Vec<usize> = t.lines().map(str::len).collect();
        assert!(widths.iter().all(|&w| w == widths[0]), "{t}");
        assert!(t.lines().nth(2).unwrap().trim_start().starts_with("1000"));
    }

    #[test]
    fn csv_has_one_row_per_report() {
        let d = covergeo_core::shapes::disk(6.0, 1.0).unwrap();
        let r = covergeo_core::montecarlo::estimate_probability(&d, 3.0, 10, 5, 1, CoverageMode::Full, None).unwrap();
        let csv = ladder_csv(&[r.clone(), r]);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("10,,"));
    }
}

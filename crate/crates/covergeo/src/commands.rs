//! The subcommands. Each one writes its artifacts under the output
//! directory and returns the documents main prints.

use std::fs;
use std::path::{Path, PathBuf};

use covergeo_core::bounds::{bound_reach, bound_regions, bound_u_minus_a, CoverageBound};
use covergeo_core::flatnorm::{almost_cover_pipeline, fill_in_experiment, flatnorm_minimize, lambda_threshold, minimizer_reach_check};
use covergeo_core::montecarlo::{CoverageMode, Sampler, TrialReport};
use covergeo_core::partition::{certify_good, good_partition, partition_with_eta, restrict_partition, Partition};
use covergeo_core::GridSet;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::report::{self, document, to_pretty};
use crate::run::{estimate_parallel, resolve_ladder};
use crate::shape::{describe, Shape};
use crate::{raster, svg};

/// What a command produced.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    /// Human-readable lines for stderr.
    pub summary: String,
    /// Set when an empirical check failed; artifacts are still written.
    pub failure: Option<String>,
}

impl Output {
    fn new(json: Value, summary: String) -> Self {
        Output { json, csv: None, svg: None, summary, failure: None }
    }
}

struct Writer<'a> {
    dir: &'a Path,
    unit: &'a str,
}

impl Writer<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn text(&self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, body).map_err(|e| Error::io(p, e))
    }

    fn json(&self, name: &str, v: &Value) -> Result<()> {
        self.text(name, &to_pretty(v))
    }

    fn mask(&self, name: &str, set: &GridSet) -> Result<()> {
        raster::write_mask(&self.path(name), set, self.unit)
    }

    fn labels(&self, name: &str, p: &Partition) -> Result<()> {
        raster::write_labels(&self.path(name), p, self.unit)
    }
}

fn writer(cfg: &ExperimentConfig) -> Result<Writer<'_>> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    Ok(Writer { dir: &cfg.out, unit: &cfg.unit })
}

fn coverage_radius(delta: f64) -> f64 {
    3.0 * delta
}

pub fn cmd_shape(cfg: &ExperimentConfig) -> Result<Output> {
    let shape = cfg.shape.build()?;
    let w = writer(cfg)?;
    w.mask("mask.pbm", &shape.set)?;
    let mut body = json!({
        "shape": cfg.shape.to_string(),
        "set": report::set_summary(&shape.set),
    });
    if let (Some(u), Some(a)) = (&shape.enclosing, &shape.removed) {
        w.mask("enclosing.pbm", u)?;
        w.mask("removed.pbm", a)?;
        body["enclosing"] = report::set_summary(u);
        body["removed"] = report::set_summary(a);
    }
    let doc = document("shape", &cfg.unit, body);
    w.json("shape.json", &doc)?;
    let picture = svg::overlay_svg(&shape.set, &[], &cfg.shape.to_string());
    w.text("shape.svg", &picture)?;
    let summary = format!(
        "{}: {}, measure {}\n",
        cfg.shape,
        describe(shape.set.lattice()),
        shape.set.measure()
    );
    Ok(Output { svg: Some(picture), ..Output::new(doc, summary) })
}

pub fn cmd_partition(cfg: &ExperimentConfig, with_eta: bool) -> Result<Output> {
    let delta = cfg.need_delta()?;
    let shape = cfg.shape.build()?;
    let p = if with_eta {
        partition_with_eta(&shape.set, delta)?
    } else {
        good_partition(&shape.set, delta)?
    };
    let cert = certify_good(&p, delta);
    let w = writer(cfg)?;
    w.labels("labels.pgm", &p)?;
    let regions = document("partition", &cfg.unit, report::partition_json(&p));
    w.json("regions.json", &regions)?;
    let certificate = document("good-partition-certificate", &cfg.unit, report::good_certificate_json(&cert));
    w.json("certificate.json", &certificate)?;
    let picture = svg::partition_svg(p.base.lattice(), &p.labels, &format!("{} at delta {delta}", cfg.shape));
    w.text("partition.svg", &picture)?;
    let summary = format!(
        "{} regions, min measure {:.4}, max diameter {:.4}, certificate {}\n",
        p.len(),
        cert.min_measure(),
        cert.max_diameter(),
        if cert.verdict { "pass" } else { "FAIL" }
    );
    let doc = document(
        "partition-summary",
        &cfg.unit,
        json!({"partition": report::partition_json(&p), "certificate": report::good_certificate_json(&cert)}),
    );
    let failure = (!cert.verdict).then(|| format!("{} regions fail the certificate", cert.failures()));
    Ok(Output { svg: Some(picture), failure, ..Output::new(doc, summary) })
}

/// Partition and bounds for a shape: the covering bound matching the
/// shape (reach, or `U ∖ A` for a disk with a hole) and the per-region
/// bound.
struct Bounds {
    partition: Partition,
    primary: CoverageBound,
    regions: CoverageBound,
}

fn bounds_for(shape: &Shape, delta: f64) -> Result<Bounds> {
    let e = &shape.set;
    let n = e.ndim();
    match (&shape.enclosing, &shape.removed) {
        (Some(u), Some(a)) => {
            let pu = good_partition(u, delta)?;
            let primary = bound_u_minus_a(pu.len(), n, delta, a.measure(), e.measure())?;
            let partition = restrict_partition(&pu, e)?;
            let regions = bound_regions(&partition.region_measures(), e.measure())?;
            Ok(Bounds { partition, primary, regions })
        }
        _ => {
            let partition = good_partition(e, delta)?;
            let primary = bound_reach(partition.len(), n, delta, e.measure())?;
            let regions = bound_regions(&partition.region_measures(), e.measure())?;
            Ok(Bounds { partition, primary, regions })
        }
    }
}

fn bound_csv(bounds: &[&CoverageBound], ns: &[u64]) -> String {
    let mut s = String::from("N");
    for b in bounds {
        s.push(',');
        s.push_str(b.kind.name());
    }
    s.push('\n');
    for &n in ns {
        s.push_str(&n.to_string());
        for b in bounds {
            s.push(',');
            s.push_str(&b.evaluate(n).to_string());
        }
        s.push('\n');
    }
    s
}

pub fn cmd_bound(cfg: &ExperimentConfig) -> Result<Output> {
    let delta = cfg.need_delta()?;
    let shape = cfg.shape.build()?;
    let b = bounds_for(&shape, delta)?;
    let ns = resolve_ladder(&cfg.n_ladder, &b.primary)?;
    let both = [&b.primary, &b.regions];
    let table = report::bound_table(&both, &ns);
    let csv = bound_csv(&both, &ns);
    let rows: Vec<Value> = ns
        .iter()
        .map(|&n| json!({"N": n, b.primary.kind.name(): b.primary.evaluate(n), "regions": b.regions.evaluate(n)}))
        .collect();
    let doc = document(
        "bounds",
        &cfg.unit,
        json!({
            "shape": cfg.shape.to_string(),
            "delta": delta,
            "regions": b.partition.len(),
            "bounds": [report::bound_json(&b.primary), report::bound_json(&b.regions)],
            "table": rows,
        }),
    );
    let w = writer(cfg)?;
    w.json("bound.json", &doc)?;
    w.text("bound.txt", &table)?;
    w.text("bound.csv", &csv)?;
    Ok(Output { csv: Some(csv), ..Output::new(doc, table) })
}

fn reports_json(reports: &[TrialReport]) -> Value {
    Value::Array(reports.iter().map(report::trial_report_json).collect())
}

fn ladder_summary(reports: &[TrialReport]) -> String {
    let mut s = format!("{:>10} {:>12} {:>10} {:>10} {:>10}  verdict\n", "N", "bound", "p_hat", "lo", "hi");
    for r in reports {
        let verdict = match r.verdict {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        s.push_str(&format!(
            "{:>10} {:>12.6} {:>10.4} {:>10.4} {:>10.4}  {verdict}\n",
            r.samples,
            r.bound.unwrap_or(f64::NAN),
            r.p_hat,
            r.wilson_lo,
            r.wilson_hi
        ));
    }
    s
}

fn first_failure(reports: &[TrialReport]) -> Option<String> {
    reports.iter().find(|r| r.verdict == Some(false)).map(|r| {
        format!(
            "at N = {} the Wilson upper bound {} is below the bound {}",
            r.samples,
            r.wilson_hi,
            r.bound.unwrap_or(f64::NAN)
        )
    })
}

/// Coverage experiments along the sample-count ladder. Every rung uses
/// the same seed, so the samples of a smaller rung are a prefix of the
/// samples of a larger one.
pub fn cmd_cover(cfg: &ExperimentConfig, use_regions: bool) -> Result<Output> {
    let delta = cfg.need_delta()?;
    let shape = cfg.shape.build()?;
    let b = bounds_for(&shape, delta)?;
    let bound = if use_regions { &b.regions } else { &b.primary };
    let ns = resolve_ladder(&cfg.n_ladder, bound)?;
    let r = coverage_radius(delta);
    let reports = ns
        .iter()
        .map(|&n| estimate_parallel(&shape.set, r, n, cfg.trials, cfg.seed, CoverageMode::Full, Some(bound), cfg.threads))
        .collect::<Result<Vec<_>>>()?;
    let csv = report::ladder_csv(&reports);
    let doc = document(
        "cover",
        &cfg.unit,
        json!({
            "shape": cfg.shape.to_string(),
            "delta": delta,
            "radius": r,
            "bound": report::bound_json(bound),
            "reports": reports_json(&reports),
        }),
    );
    let sampler = Sampler::new(&shape.set, cfg.seed)?;
    let pts = sampler.sample(0, ns[0] as usize).points;
    let picture = svg::samples_svg(&shape.set, &pts, r, &format!("{} with N = {}", cfg.shape, ns[0]));
    let w = writer(cfg)?;
    w.json("cover.json", &doc)?;
    w.text("cover.csv", &csv)?;
    w.text("cover.svg", &picture)?;
    let failure = first_failure(&reports);
    Ok(Output { csv: Some(csv), svg: Some(picture), failure, ..Output::new(doc, ladder_summary(&reports)) })
}

pub fn cmd_flatnorm(cfg: &ExperimentConfig, threshold: bool, fill_in: bool) -> Result<Output> {
    if cfg.lambda.is_empty() && !threshold {
        return Err(Error::Config("flatnorm needs --lambda or --threshold".into()));
    }
    let shape = cfg.shape.build()?;
    let e = &shape.set;
    let w = writer(cfg)?;
    let mut summary = String::new();
    let mut results = Vec::new();
    let mut rows = String::from("lambda,energy,perimeter,sym_diff,reach\n");
    let mut last_svg = None;
    for (k, &lambda) in cfg.lambda.iter().enumerate() {
        let res = flatnorm_minimize(e, lambda)?;
        let reach = if res.sigma.is_empty() { None } else { Some(minimizer_reach_check(&res)?) };
        let doc = document("flatnorm", &cfg.unit, report::flatnorm_json(&res, reach.as_ref()));
        w.json(&format!("flatnorm-{k:02}.json"), &doc)?;
        w.mask(&format!("sigma-{k:02}.pbm"), &res.sigma)?;
        let picture = svg::overlay_svg(e, &[(&res.sigma, "#e4572e")], &format!("lambda {lambda}"));
        w.text(&format!("overlay-{k:02}.svg"), &picture)?;
        last_svg = Some(picture);
        let reach_word = match &reach {
            Some(r) if r.verdict => "pass",
            Some(_) => "fail",
            None => "",
        };
        rows.push_str(&format!("{lambda},{},{},{},{reach_word}\n", res.energy, res.perim_sigma, res.sym_diff_measure));
        summary.push_str(&format!(
            "lambda {lambda}: energy {:.4}, |sigma| {:.1}, |S| {:.1}{}\n",
            res.energy,
            res.sigma.measure(),
            res.sym_diff_measure,
            if reach_word.is_empty() { String::new() } else { format!(", reach {reach_word}") }
        ));
        results.push(doc);
    }
    let mut body = json!({"shape": cfg.shape.to_string(), "results": results});
    if threshold {
        let t = lambda_threshold(e)?;
        summary.push_str(&format!("threshold {} in [{}, {}]\n", t.lambda, t.lo, t.hi));
        body["threshold"] = report::threshold_json(&t);
    }
    let mut failure = None;
    if fill_in {
        let (u, a) = match (&shape.enclosing, &shape.removed) {
            (Some(u), Some(a)) => (u, a),
            _ => return Err(Error::Config("--fill-in needs a disk-minus-hole shape".into())),
        };
        let mut reports = Vec::new();
        for &lambda in &cfg.lambda {
            let rep = fill_in_experiment(u, a, lambda)?;
            summary.push_str(&format!(
                "fill-in at lambda {lambda}: |sigma - U| {} vs tolerance {}: {}\n",
                rep.sym_diff_to_u,
                rep.tolerance,
                if rep.verdict { "restored" } else { "not restored" }
            ));
            if !rep.verdict && failure.is_none() {
                failure = Some(format!("minimizer at lambda {lambda} does not restore the disk"));
            }
            reports.push(report::fill_in_json(&rep));
        }
        body["fill_in"] = Value::Array(reports);
    }
    let doc = document("flatnorm-ladder", &cfg.unit, body);
    w.json("flatnorm.json", &doc)?;
    w.text("flatnorm.csv", &rows)?;
    Ok(Output { csv: Some(rows), svg: last_svg, failure, ..Output::new(doc, summary) })
}

pub fn cmd_pipeline(cfg: &ExperimentConfig) -> Result<Output> {
    let delta = cfg.need_delta()?;
    let lambda = cfg.need_lambda()?;
    let shape = cfg.shape.build()?;
    let e = &shape.set;
    let out = almost_cover_pipeline(e, lambda, delta)?;
    let ns = resolve_ladder(&cfg.n_ladder, &out.bound)?;
    let r = coverage_radius(delta);
    let mode = CoverageMode::Almost(out.alpha);
    let reports = ns
        .iter()
        .map(|&n| estimate_parallel(e, r, n, cfg.trials, cfg.seed, mode, Some(&out.bound), cfg.threads))
        .collect::<Result<Vec<_>>>()?;
    let csv = report::ladder_csv(&reports);
    let mut body = report::pipeline_json(&out, delta);
    body["shape"] = json!(cfg.shape.to_string());
    body["radius"] = json!(r);
    body["reports"] = reports_json(&reports);
    let doc = document("pipeline", &cfg.unit, body);
    let w = writer(cfg)?;
    w.json("pipeline.json", &doc)?;
    w.text("cover.csv", &csv)?;
    w.mask("sigma.pbm", &out.flat.sigma)?;
    w.mask("a.pbm", &out.a)?;
    w.labels("labels.pgm", &out.partition)?;
    let picture = svg::overlay_svg(e, &[(&out.flat.sigma, "#e4572e")], &format!("lambda {lambda}, delta {delta}"));
    w.text("overlay.svg", &picture)?;
    w.text("partition.svg", &svg::partition_svg(out.partition.base.lattice(), &out.partition.labels, "A"))?;
    let mut summary = format!(
        "threshold {:.6}, |S| {}, |A| {}, alpha {:.6}, {} regions, good {}, almost {}\n",
        out.threshold.lambda,
        out.flat.sym_diff_measure,
        out.a.measure(),
        out.alpha,
        out.partition.len(),
        if out.good.verdict { "pass" } else { "FAIL" },
        if out.almost.verdict { "pass" } else { "FAIL" },
    );
    summary.push_str(&ladder_summary(&reports));
    let failure = if !out.good.verdict {
        Some("restricted partition fails the good-partition certificate".to_string())
    } else if !out.almost.verdict {
        Some("restricted partition is not an almost partition".to_string())
    } else {
        first_failure(&reports)
    };
    Ok(Output { csv: Some(csv), svg: Some(picture), failure, ..Output::new(doc, summary) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RenderKind {
    /// Partition labels, from `--labels` or computed at `--delta`.
    Partition,
    /// Boundaries of the shape and of `--overlay` masks or the minimizer
    /// at `--lambda`.
    Overlay,
    /// One trial of samples with their `3δ` balls.
    Samples,
}

pub fn cmd_render(cfg: &ExperimentConfig, kind: RenderKind, labels: Option<&Path>, overlays: &[PathBuf]) -> Result<Output> {
    let shape = cfg.shape.build()?;
    let e = &shape.set;
    let title = cfg.shape.to_string();
    let picture = match kind {
        RenderKind::Partition => match labels {
            Some(path) => {
                let (lat, labels) = raster::read_labels(path)?;
                svg::partition_svg(&lat, &labels, &title)
            }
            None => {
                let p = good_partition(e, cfg.need_delta()?)?;
                svg::partition_svg(e.lattice(), &p.labels, &title)
            }
        },
        RenderKind::Overlay => {
            let mut sets = Vec::new();
            for path in overlays {
                let s = raster::read_mask(path)?;
                if s.lattice() != e.lattice() {
                    return Err(Error::format(path, "overlay lattice differs from the shape's"));
                }
                sets.push(s);
            }
            for &lambda in &cfg.lambda {
                sets.push(flatnorm_minimize(e, lambda)?.sigma);
            }
            const STROKES: [&str; 4] = ["#e4572e", "#2e9e44", "#8e44ad", "#f0a202"];
            let pairs: Vec<(&GridSet, &str)> =
                sets.iter().enumerate().map(|(k, s)| (s, STROKES[k % STROKES.len()])).collect();
            svg::overlay_svg(e, &pairs, &title)
        }
        RenderKind::Samples => {
            let n = match &cfg.n_ladder {
                crate::config::Ladder::Explicit(ns) => ns[0],
                crate::config::Ladder::Auto => {
                    return Err(Error::Config("render samples needs --n-ladder with a sample count".into()))
                }
            };
            let r = coverage_radius(cfg.need_delta()?);
            let pts = Sampler::new(e, cfg.seed)?.sample(0, n as usize).points;
            svg::samples_svg(e, &pts, r, &format!("{title} with N = {n}"))
        }
    };
    let w = writer(cfg)?;
    w.text("render.svg", &picture)?;
    let doc = document("render", &cfg.unit, json!({"shape": title, "file": w.path("render.svg")}));
    Ok(Output { svg: Some(picture), ..Output::new(doc, String::new()) })
}

//! End-to-end experiment pipeline: build the domain, estimate the curve
//! constant, classify the two-sided corpus, estimate dimensions, check the
//! bound arithmetic and the sharpness calculus, and emit a deterministic
//! report plus CSV/SVG artifacts.

use serde::{Deserialize, Serialize};

use crate::bounds::{lemma41_bound, main_bound, verify_sharpness, SharpnessReport};
use crate::cantor::{endpoints, CantorParams};
use crate::comb::CombDomain;
use crate::curve::{
    check_admissible, estimate_c_detailed, pairs_csv, CEstimate, Exponent, PairRecord,
};
use crate::dimension::{
    box_count, box_counts_csv, build_hierarchy, net_diagnostics_csv, net_dimension_bound_checked,
    s_grid, DimensionEstimate, PointSet,
};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::render::domain_svg;
use crate::twosided::detect_corpus;

pub const REPORT_SCHEMA: &str = "comb-report/1";

/// Pipeline configuration; the CLI accepts the same keys as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub lambda: f64,
    pub p: f64,
    /// Endpoint level used for the two-sided corpus and dimension sets.
    pub depth: u32,
    pub tent_depth: u32,
    pub max_depth: u32,
    pub resolution: usize,
    pub pairs: usize,
    pub seed: u64,
    pub c_const: f64,
    pub tol: f64,
    /// Dyadic scale range `2^-i_min .. 2^-i_max` for detection.
    pub i_min: u32,
    pub i_max: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lambda: 1.0 / 3.0,
            p: 1.2,
            depth: 5,
            tent_depth: 8,
            max_depth: 40,
            resolution: 512,
            pairs: 2000,
            seed: 1729,
            c_const: 9.0,
            tol: 1e-4,
            i_min: 3,
            i_max: 8,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(CombDomain, Exponent)> {
        let cantor = CantorParams::new(self.lambda, self.max_depth)
            .map_err(|e| Error::Config(e.to_string()))?;
        let domain = CombDomain::new(cantor, self.tent_depth)
            .map_err(|e| Error::Config(e.to_string()))?;
        let p = Exponent::new(self.p).map_err(|e| Error::Config(e.to_string()))?;
        check_admissible(self.lambda, p).map_err(|e| Error::Config(e.to_string()))?;
        if self.pairs == 0 {
            return Err(Error::Config("pairs must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.i_min >= self.i_max {
            return Err(Error::Config(format!(
                "need i_min < i_max, got {} >= {}",
                self.i_min, self.i_max
            )));
        }
        if self.depth > 10 {
            return Err(Error::Config(format!(
                "corpus depth {} materializes too many endpoints (max 10)",
                self.depth
            )));
        }
        Ok((domain, p))
    }
}

/// Fixed off-boundary / special controls added to the endpoint corpus.
pub fn control_points() -> Vec<Point2> {
    vec![
        Point2::new(0.0, 0.0),
        Point2::new(-1.0, 0.0),
        Point2::new(0.0, 1.0),
        Point2::new(-0.5, -1.0),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub x: f64,
    pub y: f64,
    pub verdict: String,
    pub expected_two_sided: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CReportSection {
    pub estimate: CEstimate,
    pub lemma_bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionSection {
    pub corpus_size: usize,
    pub two_sided_count: usize,
    pub inconclusive_count: usize,
    pub disagreements: usize,
    pub verdicts: Vec<VerdictRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimensionSection {
    pub exact_dim: f64,
    pub box_estimate: DimensionEstimate,
    pub net_estimate: DimensionEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundSection {
    pub c_ref: f64,
    pub rhs: f64,
    pub exact_dim: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Consolidated experiment report; serialization order is fixed by the
/// struct layout so identical runs serialize byte-identically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ExperimentConfig,
    pub curve_constant: CReportSection,
    pub detection: DetectionSection,
    pub dimension: DimensionSection,
    pub bound: BoundSection,
    pub sharpness: SharpnessReport,
    pub pass: bool,
}

/// Output files of one run.
#[derive(Debug, Clone)]
pub struct ExperimentArtifacts {
    pub report_json: String,
    pub pairs_csv: String,
    pub boxcounts_csv: String,
    pub nets_csv: String,
    pub domain_svg: String,
}

fn corpus_for(domain: &CombDomain, depth: u32) -> Result<(Vec<Point2>, Vec<bool>)> {
    let ts = endpoints(domain.cantor(), depth)?;
    let mut pts: Vec<Point2> = ts.iter().map(|&t| Point2::new(t, 0.0)).collect();
    let mut expected: Vec<bool> = ts.iter().map(|&t| t != 0.0).collect();
    for ctl in control_points() {
        if !pts.contains(&ctl) {
            pts.push(ctl);
            expected.push(false);
        }
    }
    Ok((pts, expected))
}

/// Runs the full pipeline. Deterministic for a fixed config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(ExperimentReport, ExperimentArtifacts)> {
    let (domain, p) = config.validate()?;

    // Stage 1: curve-condition constant.
    let (estimate, records): (CEstimate, Vec<PairRecord>) =
        estimate_c_detailed(&domain, p, config.pairs, config.seed, config.tol)
            .map_err(|e| e.in_stage("estimate-c"))?;
    let lemma = lemma41_bound(p, config.lambda, config.c_const)
        .map_err(|e| e.in_stage("estimate-c"))?;
    let curve_constant = CReportSection {
        estimate,
        lemma_bound: lemma,
        within_bound: estimate.value <= lemma,
    };

    // Stage 2: two-sided corpus.
    let (corpus, expected) = corpus_for(&domain, config.depth).map_err(|e| e.in_stage("detect"))?;
    let verdicts = detect_corpus(&domain, &corpus, config.i_min, config.i_max, config.resolution)
        .map_err(|e| e.in_stage("detect"))?;
    let mut detected_points = Vec::new();
    let mut records_v = Vec::new();
    let mut inconclusive = 0usize;
    let mut disagreements = 0usize;
    for ((pt, verdict), want) in corpus.iter().zip(&verdicts).zip(&expected) {
        if verdict.is_two_sided() {
            detected_points.push(*pt);
        }
        if verdict.is_inconclusive() {
            inconclusive += 1;
        }
        let agrees = verdict.is_two_sided() == *want;
        if !agrees {
            disagreements += 1;
        }
        records_v.push(VerdictRecord {
            x: pt.x,
            y: pt.y,
            verdict: verdict.label().to_string(),
            expected_two_sided: *want,
            agrees,
        });
    }
    let detection = DetectionSection {
        corpus_size: corpus.len(),
        two_sided_count: detected_points.len(),
        inconclusive_count: inconclusive,
        disagreements,
        verdicts: records_v,
    };

    // Stage 3: dimension of the detected set.
    let detected_set = PointSet::new(detected_points.clone(), "two-sided points");
    let scales: Vec<f64> = (2..=config.depth.max(4) as i32)
        .map(|k| config.lambda.powi(k))
        .collect();
    let box_estimate = box_count(&detected_set, &scales).map_err(|e| e.in_stage("dimension"))?;
    let hierarchy = build_hierarchy(&detected_set, 0.5, 2, 12).map_err(|e| e.in_stage("dimension"))?;
    let net_estimate = net_dimension_bound_checked(&hierarchy, &s_grid(0.0, 2.0, 0.01), 2)
        .map_err(|e| e.in_stage("dimension"))?;
    let exact_dim = 2.0f64.ln() / -(config.lambda.ln());
    let dimension = DimensionSection {
        exact_dim,
        box_estimate: box_estimate.clone(),
        net_estimate: net_estimate.clone(),
    };

    // Stage 4: bound consistency against the reference constant.
    let c_ref = curve_constant.estimate.value.max(lemma).max(1.0);
    let bound_report = main_bound(p, c_ref).map_err(|e| e.in_stage("bound"))?;
    let bound = BoundSection {
        c_ref,
        rhs: bound_report.rhs,
        exact_dim,
        margin: bound_report.rhs - exact_dim,
        pass: exact_dim <= bound_report.rhs,
    };

    // Stage 5: sharpness calculus.
    let sharpness =
        verify_sharpness(p, config.c_const, 1000).map_err(|e| e.in_stage("sharpness"))?;

    let pass = curve_constant.within_bound
        && detection.disagreements == 0
        && detection.inconclusive_count == 0
        && bound.pass
        && sharpness.all_passed();

    let report = ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        config: config.clone(),
        curve_constant,
        detection,
        dimension,
        bound,
        sharpness,
        pass,
    };

    let artifacts = ExperimentArtifacts {
        report_json: serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?,
        pairs_csv: pairs_csv(&records),
        boxcounts_csv: box_counts_csv(&box_estimate),
        nets_csv: net_diagnostics_csv(&net_estimate),
        domain_svg: domain_svg(&domain, &[("#d02020", &detected_points)])
            .map_err(|e| e.in_stage("render"))?,
    };
    Ok((report, artifacts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            depth: 3,
            resolution: 128,
            pairs: 30,
            i_min: 3,
            i_max: 6,
            tol: 1e-4,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn config_validation_rejects_inadmissible_pairs() {
        let cfg = ExperimentConfig {
            p: 1.5,
            lambda: 1.0 / 3.0,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn pipeline_runs_and_passes_on_small_config() {
        let (report, artifacts) = run_experiment(&small_config()).unwrap();
        assert!(report.pass, "report: {}", artifacts.report_json);
        assert!(report.curve_constant.within_bound);
        assert_eq!(report.detection.disagreements, 0);
        assert!(artifacts.pairs_csv.lines().count() == 31);
        assert!(artifacts.boxcounts_csv.starts_with("scale,count"));
        assert!(artifacts.domain_svg.contains("<svg"));
    }

    #[test]
    fn pipeline_is_deterministic() {
        let cfg = small_config();
        let (_, a) = run_experiment(&cfg).unwrap();
        let (_, b) = run_experiment(&cfg).unwrap();
        assert_eq!(a.report_json, b.report_json);
        assert_eq!(a.pairs_csv, b.pairs_csv);
    }
}

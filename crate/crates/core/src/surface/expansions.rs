use super::geometry::SurfaceGeometry;
use serde::Serialize;

/// Null expansions `theta_pm = tr_Sigma K +- H` and `|H|^2 = H^2 - (tr_Sigma K)^2`.
#[derive(Clone, Debug)]
pub struct NullExpansionField {
    pub theta_plus: Vec<f64>,
    pub theta_minus: Vec<f64>,
    pub mean_curvature: Vec<f64>,
    pub trace_sigma_k: Vec<f64>,
    pub norm_h_sq: Vec<f64>,
    /// Nodes that take part in classification and sup/inf scans.
    pub mask: Vec<bool>,
}

pub fn null_expansions(geo: &SurfaceGeometry, h: &[f64], tr_k: &[f64]) -> NullExpansionField {
    NullExpansionField {
        theta_plus: h.iter().zip(tr_k).map(|(h, t)| t + h).collect(),
        theta_minus: h.iter().zip(tr_k).map(|(h, t)| t - h).collect(),
        mean_curvature: h.to_vec(),
        trace_sigma_k: tr_k.to_vec(),
        norm_h_sq: h.iter().zip(tr_k).map(|(h, t)| h * h - t * t).collect(),
        mask: geo.scan_mask.clone(),
    }
}

impl NullExpansionField {
    /// `|H|` where the mean curvature vector is spacelike, `None` elsewhere.
    pub fn norm_h(&self) -> Vec<Option<f64>> {
        self.norm_h_sq.iter().map(|q| (*q > 0.0).then(|| q.sqrt())).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Trapped,
    Marginal,
    Untrapped,
    /// Both expansions positive.
    AntiTrapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalClass {
    Trapped,
    MarginallyTrapped,
    Untrapped,
    Mixed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub trapped: usize,
    pub marginal: usize,
    pub untrapped: usize,
    pub anti_trapped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub label: CausalClass,
    pub counts: ClassCounts,
    #[serde(skip)]
    pub per_point: Vec<Option<PointClass>>,
}

fn point_class(tp: f64, tm: f64, tol: f64) -> PointClass {
    if tp.abs() <= tol || tm.abs() <= tol {
        PointClass::Marginal
    } else if tp < 0.0 && tm < 0.0 {
        PointClass::Trapped
    } else if tp > 0.0 && tm > 0.0 {
        PointClass::AntiTrapped
    } else {
        PointClass::Untrapped
    }
}

// A connected untrapped surface has theta_+ of one sign; nodes of both signs
// mean the expansions vanish between them.
fn single_sign(n: &NullExpansionField) -> bool {
    let mut signs = n.theta_plus.iter().zip(&n.mask).filter(|(_, m)| **m).map(|(t, _)| *t > 0.0);
    match signs.next() {
        Some(first) => signs.all(|s| s == first),
        None => true,
    }
}

/// Global label when every scanned node agrees, `Mixed` otherwise. Untrapped
/// nodes with both signs of `theta_+` also give `Mixed`.

pub fn classify(n: &NullExpansionField, tol: f64) -> Classification {
    let mut counts = ClassCounts::default();
    let per_point: Vec<Option<PointClass>> = (0..n.theta_plus.len())
        .map(|i| {
            n.mask[i].then(|| {
                let c = point_class(n.theta_plus[i], n.theta_minus[i], tol);
                match c {
                    PointClass::Trapped => counts.trapped += 1,
                    PointClass::Marginal => counts.marginal += 1,
                    PointClass::Untrapped => counts.untrapped += 1,
                    PointClass::AntiTrapped => counts.anti_trapped += 1,
                }
                c
            })
        })
        .collect();
    let total = counts.trapped + counts.marginal + counts.untrapped + counts.anti_trapped;
    let label = if total > 0 && counts.trapped == total {
        CausalClass::Trapped
    } else if total > 0 && counts.marginal == total {
        CausalClass::MarginallyTrapped
    } else if total > 0 && counts.untrapped == total && single_sign(n) {
        CausalClass::Untrapped
    } else {
        CausalClass::Mixed
    };
    Classification { label, counts, per_point }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    MeanConvex,
    MeanConcave,
    Violation,
}

/// Sign of the mean curvature over the scanned nodes.
pub fn dichotomy_check(h: &[f64], mask: &[bool], tol: f64) -> Dichotomy {
    let scanned = || h.iter().zip(mask).filter(|(_, m)| **m).map(|(v, _)| *v);
    if scanned().all(|v| v > tol) {
        Dichotomy::MeanConvex
    } else if scanned().all(|v| v < -tol) {
        Dichotomy::MeanConcave
    } else {
        Dichotomy::Violation
    }
}

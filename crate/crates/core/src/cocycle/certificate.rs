use serde::{Deserialize, Serialize};

use super::remove::capture_time;
use super::{Cocycle, OnSet};
use crate::castles::{Castle, ShortTowerChecks};
use crate::error::{Error, Result};
use crate::matperturb::{product, Field, Mat, VERIFY_SLACK};

/// Base words listed in a tower record before it falls back to a count.
const LISTED_WORDS: usize = 64;

const SCOPE: &str = "Certifies the sufficient conditions of the tower argument: the castle is an exact \
partition, the cocycle is constant on every floor, every tall tower has kappa of its product above M^2, \
and every short tower has kappa_e of its product raised to m = ceil(N / height) above M^2 together with \
exact N-capturing and re-entry-at-base checks. Individual points are not enumerated.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `κ` of the product along the tower.
    Kappa,
    /// `κ_e` of the product along the tower, raised to `m = ⌈N/ℓ⌉`.
    KappaEPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerRecord {
    pub tower: usize,
    pub height: usize,
    pub short: bool,
    pub orbit: Option<String>,
    pub base_window: (i64, i64),
    pub base_count: String,
    /// Words of the base on its window, when there are few enough.
    pub base_words: Option<Vec<String>>,
    pub statistic: Statistic,
    /// `m = ⌈N/ℓ⌉` for short towers, `1` for tall ones.
    pub power: usize,
    pub value: f64,
    /// `M²`; the value must exceed it strictly.
    pub required: f64,
    /// Exact checks on short towers.
    pub checks: Option<ShortTowerChecks>,
    /// `‖G^{(mℓ)}(y) - [G^{(ℓ)}(y)]^m‖ / ‖[G^{(ℓ)}(y)]^m‖` at a sample base
    /// point `y` of a short tower.
    pub power_identity_error: Option<f64>,
    pub pass: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    /// `d'(G, F)`.
    pub dprime: f64,
    /// `C_0 = sup ‖F‖`.
    pub c0: f64,
    /// `ε C_0 (1 + slack)`.
    pub bound: f64,
    /// `max ‖G - F‖ / ‖F‖` over the common refinement.
    pub max_relative_change: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcCertificate {
    pub m: f64,
    pub epsilon: f64,
    pub n: usize,
    pub depth: Option<usize>,
    pub field: Field,
    pub d: usize,
    /// Floors of the castle partition the space (exact).
    pub partition: bool,
    pub towers: Vec<TowerRecord>,
    /// Every point reaches `κ > M` within `|n| <=` this many steps.
    pub horizon: usize,
    pub metric: Option<MetricRecord>,
    pub tolerance: f64,
    pub scope: String,
    pub pass: bool,
}

impl QcCertificate {
    pub fn failed_towers(&self) -> Vec<usize> {
        self.towers.iter().filter(|t| !t.pass).map(|t| t.tower).collect()
    }
}

fn relative_distance(a: &Mat, b: &Mat) -> Result<f64> {
    Ok(a.sub(b)?.op_norm()? / b.op_norm()?)
}

/// Checks the sufficient conditions for `κ(G^{(n)}(x)) > M` at every point,
/// tower by tower. With `original`, also bounds `d'(G, F)`.
pub fn verify_qc_certificate(
    g: &Cocycle,
    castle: &Castle,
    m: f64,
    eps: f64,
    original: Option<&Cocycle>,
) -> Result<QcCertificate> {
    verify_qc_certificate_with(g, castle, m, eps, original, VERIFY_SLACK)
}

/// [`verify_qc_certificate`] with relative slack `tol` in the metric bounds
/// and the power identity.
pub fn verify_qc_certificate_with(
    g: &Cocycle,
    castle: &Castle,
    m: f64,
    eps: f64,
    original: Option<&Cocycle>,
    tol: f64,
) -> Result<QcCertificate> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance must be finite and >= 0, got {tol}")));
    }
    let n = capture_time(m, eps)?;
    if !std::sync::Arc::ptr_eq(castle.space(), g.space()) && **castle.space() != **g.space() {
        return Err(Error::SpaceMismatch);
    }
    castle.check_partition()?;
    let mut checked = castle.clone();
    checked.n = Some(n);
    let required = m * m;

    let mut towers = Vec::with_capacity(castle.towers.len());
    for (i, t) in castle.towers.iter().enumerate() {
        let mut mats = Vec::with_capacity(t.height);
        for (j, floor) in t.floors().iter().enumerate() {
            match g.value_on(floor)? {
                OnSet::Constant(a) => mats.push(a),
                _ => return Err(Error::NotConstantOnFloor { tower: i, floor: j }),
            }
        }
        let p = product(&mats)?;
        let short = t.height < n;
        let mut failure = None;
        let (statistic, power, value, checks, power_identity_error) = if short {
            let power = n.div_ceil(t.height);
            let value = p.kappa_e()?.powi(power as i32);
            let checks = checked.short_tower_checks(i)?;
            if !checks.pass() {
                failure = Some("exact capture or re-entry check failed".to_string());
            }
            let y = t
                .base
                .sample_point()
                .ok_or_else(|| Error::Internal(format!("tower {i} has an empty base")))?;
            let once = g.product(&y, t.height as i64)?;
            let many = g.product(&y, (power * t.height) as i64)?;
            let err = relative_distance(&many, &once.pow(power as u32))?;
            if err > tol {
                failure.get_or_insert(format!("power identity off by {err:e}"));
            }
            (Statistic::KappaEPower, power, value, Some(checks), Some(err))
        } else {
            (Statistic::Kappa, 1, p.kappa()?, None, None)
        };
        if !(value > required) {
            failure = Some(format!("{value} does not exceed M^2 = {required}"));
        }
        let base = t.base.tighten();
        let (a, b) = base.window();
        let words = base.words(LISTED_WORDS).map(|ws| {
            ws.iter()
                .map(|w| castle.space().format_word(w))
                .collect::<Vec<_>>()
        });
        towers.push(TowerRecord {
            tower: i,
            height: t.height,
            short,
            orbit: t.orbit.as_ref().map(|o| o.label().to_string()),
            base_window: (a, b),
            base_count: base.count().to_string(),
            base_words: words,
            statistic,
            power,
            value,
            required,
            checks,
            power_identity_error,
            pass: failure.is_none(),
            failure,
        });
    }

    let metric = match original {
        None => None,
        Some(f) => {
            let c0 = f.sup_norm()?;
            let mut dprime: f64 = 0.0;
            let mut rel: f64 = 0.0;
            for (a, b) in g.refinement(f)? {
                let diff = a.sub(b)?.op_norm()?;
                dprime = dprime.max(diff);
                rel = rel.max(diff / b.op_norm()?);
            }
            let bound = eps * c0 * (1.0 + tol);
            Some(MetricRecord {
                dprime,
                c0,
                bound,
                max_relative_change: rel,
                pass: dprime <= bound && rel <= eps * (1.0 + tol),
            })
        }
    };

    let max_height = castle.towers.iter().map(|t| t.height).max().unwrap_or(1);
    let pass = towers.iter().all(|t| t.pass) && metric.as_ref().is_none_or(|r| r.pass);
    Ok(QcCertificate {
        m,
        epsilon: eps,
        n,
        depth: castle.depth,
        field: g.field(),
        d: g.dim(),
        partition: true,
        towers,
        horizon: n * max_height,
        metric,
        tolerance: tol,
        scope: SCOPE.to_string(),
        pass,
    })
}

//! Central finite-difference check of the analytic gradient.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{Batch, Transformer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    /// Parameter slot and flat index of the worst coordinate.
    pub worst: Option<(String, usize)>,
}

/// |a − n| / max(|a|, |n|, 1e−8)
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares the gradient of the summed loss against central differences
/// with step `epsilon` on `coords` random coordinates. Dropout is off.
pub fn gradient_check(
    model: &mut Transformer<f64>,
    batch: &Batch,
    smoothing: f64,
    epsilon: f64,
    coords: usize,
    seed: u64,
) -> GradCheckReport {
    let n = model.param_count();
    let mut grads = vec![0.0; n];
    model.loss(batch, smoothing, 1.0, None, Some(&mut grads));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n, coords.min(n)).into_vec();
    idx.sort_unstable();

    let mut report = GradCheckReport {
        checked: idx.len(),
        max_rel_error: 0.0,
        worst: None,
    };
    for i in idx {
        let orig = model.params[i];
        model.params[i] = orig + epsilon;
        let plus = model.loss(batch, smoothing, 1.0, None, None).loss;
        model.params[i] = orig - epsilon;
        let minus = model.loss(batch, smoothing, 1.0, None, None).loss;
        model.params[i] = orig;
        let numeric = (plus - minus) / (2.0 * epsilon);
        let err = relative_error(grads[i], numeric);
        // both tiny: finite differences are dominated by rounding
        let negligible = grads[i].abs() < 1e-7 && numeric.abs() < 1e-7;
        if !negligible && err > report.max_rel_error {
            report.max_rel_error = err;
            let slot = model.slots().iter().find(|s| s.range().contains(&i)).map(|s| s.name.clone());
            report.worst = slot.map(|s| (s, i));
        }
    }
    report
}

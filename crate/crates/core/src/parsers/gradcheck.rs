//! Central finite-difference checks of analytic gradients.

use super::Parameters;

#[derive(Clone, Debug, PartialEq)]
pub struct Coordinate {
    pub tensor: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
}

/// `|a - n| / max(|a|, |n|, floor)`.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Compares every coordinate of `grad` against `(L(θ + h) - L(θ - h)) / 2h`.
pub fn check<M: Parameters + Clone>(model: &M, grad: &M, step: f64, loss: impl Fn(&M) -> f64) -> Vec<Coordinate> {
    let analytic: Vec<(String, Vec<f64>)> = grad
        .tensors()
        .into_iter()
        .map(|t| (t.name, t.data.to_vec()))
        .collect();
    let mut out = Vec::new();
    let mut probe = model.clone();
    for (ti, (name, values)) in analytic.iter().enumerate() {
        for (j, &a) in values.iter().enumerate() {
            let original = probe.tensors_mut()[ti].1[j];
            probe.tensors_mut()[ti].1[j] = original + step;
            let up = loss(&probe);
            probe.tensors_mut()[ti].1[j] = original - step;
            let down = loss(&probe);
            probe.tensors_mut()[ti].1[j] = original;
            let numeric = (up - down) / (2.0 * step);
            out.push(Coordinate {
                tensor: name.clone(),
                index: j,
                analytic: a,
                numeric,
                relative_error: relative_error(a, numeric, 1e-6),
            });
        }
    }
    out
}

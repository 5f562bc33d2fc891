use crate::scalar::Scalar;

use super::mlp::{Gradients, Mlp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_relative_error: f64,
    pub worst_index: usize,
}

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares `analytic` against central differences of `loss` with step `h`
/// at the given flat parameter indices. `net` is restored afterwards.
pub fn check_gradients<T: Scalar>(
    net: &mut Mlp<T>,
    analytic: &Gradients<T>,
    indices: &[usize],
    h: T,
    mut loss: impl FnMut(&Mlp<T>) -> T,
) -> GradCheckReport {
    let mut report = GradCheckReport {
        checked: 0,
        max_relative_error: 0.0,
        worst_index: 0,
    };
    for &idx in indices {
        let orig = net.param(idx);
        net.set_param(idx, orig + h);
        let plus = loss(net);
        net.set_param(idx, orig - h);
        let minus = loss(net);
        net.set_param(idx, orig);
        let numeric = ((plus - minus) / (h + h)).to_f64_lossy();
        let err = relative_error(analytic.get(idx).to_f64_lossy(), numeric);
        if err > report.max_relative_error || report.checked == 0 {
            report.max_relative_error = err;
            report.worst_index = idx;
        }
        report.checked += 1;
    }
    report
}

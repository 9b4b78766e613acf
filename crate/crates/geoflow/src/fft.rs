//! Thin wrapper over rustfft with per-thread plan caching.
//!
//! Conventions: `synthesize` evaluates `u_j = sum_k c_k e^{2 pi i jk/M}`
//! (unscaled inverse transform), `analyze` recovers `c_k` with the `1/M`
//! factor. The pair is an exact round trip.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Spectral coefficients (in wrap-around order) -> grid values, unscaled.
pub fn synthesize(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Grid values -> spectral coefficients (wrap-around order), scaled by 1/M.
pub fn analyze(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
    let s = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

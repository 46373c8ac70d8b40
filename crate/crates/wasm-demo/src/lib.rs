//! Browser bindings for the demo page in `www/`. Results cross the boundary
//! as flat `Float64Array`s; the plain functions underneath are what the
//! native tests exercise.

use photon_mode::analytic::{m_temp, mu_a_max, p_temp};
use photon_mode::experiment::{run_chain, LabParams, TauConvention};
use photon_mode::kernels::TemporalScenario;
use photon_mode::matcher::{
    alignment_bracket, alignment_search_grid, evaluate_match, optimize_alignment, spatial_purity_report,
};
use photon_mode::MuRatios;
use wasm_bindgen::prelude::*;

/// Quadrature nodes for the alignment scan; the match agrees with the closed
/// form to about 1e-5.
const SCAN_GRID_N: usize = 256;

/// Spatial grid for the lab pinhole purity; 32 x 32 keeps it interactive.
const SPATIAL_GRID_N: usize = 32;

/// Rows of `mu_t, sqrt(P), M(mu_A_max), M(0)` for `steps` values of `mu_t`.
pub fn curves(to: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps < 2 || to.is_nan() || to <= 0.0 {
        return Err("need steps >= 2 and a positive range".into());
    }
    let mut out = Vec::with_capacity(4 * steps);
    for i in 0..steps {
        let mu = to * i as f64 / (steps - 1) as f64;
        let best = mu_a_max(mu).map_err(|e| e.to_string())?;
        out.extend([
            mu,
            p_temp(mu).map_err(|e| e.to_string())?.sqrt(),
            m_temp(mu, best).map_err(|e| e.to_string())?,
            m_temp(mu, 0.0).map_err(|e| e.to_string())?,
        ]);
    }
    Ok(out)
}

/// Numeric mode match over the alignment bracket. Layout:
/// `[mu_A_opt, match_opt, mu_A_max, sqrt(P), then (mu_A, M) pairs]`.
pub fn scan(mu_t: f64, points: usize) -> Result<Vec<f64>, String> {
    let err = |e: photon_mode::Error| e.to_string();
    if points < 2 {
        return Err("need at least 2 scan points".into());
    }
    let s = TemporalScenario::from_ratios(1.0, MuRatios::new(mu_t, 0.0).map_err(err)?).map_err(err)?;
    let grid = alignment_search_grid(&s, SCAN_GRID_N).map_err(err)?;
    let (opt, m_opt) = optimize_alignment(&s, &grid).map_err(err)?;
    let mut out = vec![opt, m_opt, mu_a_max(mu_t).map_err(err)?, p_temp(mu_t).map_err(err)?.sqrt()];
    let (lo, hi) = alignment_bracket(mu_t);
    for i in 0..points {
        let mu_a = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let t = TemporalScenario::from_ratios(1.0, MuRatios::new(mu_t, mu_a).map_err(err)?).map_err(err)?;
        out.extend([mu_a, evaluate_match(&t, &grid).map_err(err)?.mode_match]);
    }
    Ok(out)
}

/// Lab chain for the given filter, pinhole and visibility. Layout:
/// `[p_temp, p_sp, sqrt_p, m_exp, correction, m_cl, m_total, p_sp_numeric]`.
pub fn chain(filter_nm: f64, pinhole_um: f64, visibility: f64, pump_is_fund: bool) -> Result<Vec<f64>, String> {
    let err = |e: photon_mode::Error| e.to_string();
    let tau_convention = if pump_is_fund { TauConvention::PumpIsFund } else { TauConvention::PumpIsFundOverSqrt2 };
    let p = LabParams {
        filter_fwhm_nm: filter_nm,
        pinhole_diameter_um: pinhole_um,
        visibility,
        tau_convention,
        ..LabParams::default()
    };
    let r = run_chain(&p).map_err(err)?;
    let s = p.spatial_scenario().map_err(err)?;
    let numeric = spatial_purity_report(&s, &s.default_grid(SPATIAL_GRID_N).map_err(err)?).map_err(err)?.numeric;
    Ok(vec![r.p_temp, r.p_sp, r.sqrt_p, r.m_exp, r.linewidth_correction, r.m_cl, r.m_total, numeric])
}

#[wasm_bindgen]
pub fn fig_curves(to: f64, steps: usize) -> Result<Vec<f64>, JsValue> {
    curves(to, steps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn alignment_scan(mu_t: f64, points: usize) -> Result<Vec<f64>, JsValue> {
    scan(mu_t, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lab_chain(filter_nm: f64, pinhole_um: f64, visibility: f64, pump_is_fund: bool) -> Result<Vec<f64>, JsValue> {
    chain(filter_nm, pinhole_um, visibility, pump_is_fund).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_layout() {
        let c = curves(2.0, 9).unwrap();
        assert_eq!(c.len(), 36);
        assert_eq!(&c[..4], &[0.0, 1.0, 1.0, 1.0]);
        for row in c.chunks(4) {
            assert!(row[3] <= row[2] && row[2] <= row[1]);
        }
        assert!(curves(2.0, 1).is_err());
    }

    #[test]
    fn scan_finds_optimum() {
        let s = scan(1.0, 11).unwrap();
        assert!((s[0] - s[2]).abs() < 1e-3);
        assert!(s[1] <= s[3]);
        assert!((s[1] - 0.7320508).abs() < 1e-5, "{}", s[1]);
        assert_eq!(s.len(), 4 + 22);
        let best_sampled = s[4..].chunks(2).map(|p| p[1]).fold(0.0, f64::max);
        assert!(s[1] >= best_sampled);
    }

    #[test]
    fn chain_at_lab_values() {
        let c = chain(0.4, 50.0, 0.83, false).unwrap();
        assert!((c[1] - 0.87).abs() < 0.01);
        assert!((c[6] - c[2] * c[5]).abs() < 1e-12);
        assert!((0.86..=0.90).contains(&c[7]), "{c:?}");
        assert!(chain(0.4, 50.0, 1.5, false).is_err());
    }
}

//! Power-law fits of sampled profiles and the ≺ comparison `f(n) ≤ C·g(Cn + C) + Cn + C`.

use thiserror::Error;

use super::ProfileSample;

pub const MIN_FIT_ELL: u64 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProfile {
    pub samples: Vec<ProfileSample>,
    pub exponent: f64,
    pub window: (u64, u64),
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FitError {
    #[error("need at least 4 samples in the fit window, found {0}")]
    TooFewPoints(usize),
    #[error("sample lengths must be strictly increasing")]
    NotIncreasing,
    #[error("DEGENERATE_FIT: every sampled fill equals {0}")]
    Degenerate(u64),
    #[error("fill is zero at l = {0}")]
    NonPositive(u64),
}

/// About `points` log-spaced integers from `lo` to `hi` inclusive, deduplicated.
pub fn log_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    assert!(lo >= 1 && hi >= lo && points >= 2);
    let ratio = (hi as f64 / lo as f64).ln();
    let mut out: Vec<u64> =
        (0..points).map(|i| (lo as f64 * (ratio * i as f64 / (points - 1) as f64).exp()).round() as u64).collect();
    out[0] = lo;
    out[points - 1] = hi;
    out.dedup();
    out
}

/// Least-squares slope of `ln fill` against `ln ℓ` over the window (default: ℓ ≥ 8).
pub fn growth_fit(samples: &[ProfileSample], window: Option<(u64, u64)>) -> Result<GrowthProfile, FitError> {
    let (lo, hi) = window.unwrap_or((MIN_FIT_ELL, u64::MAX));
    let pts: Vec<&ProfileSample> = samples.iter().filter(|s| s.ell >= lo && s.ell <= hi).collect();
    if pts.len() < 4 {
        return Err(FitError::TooFewPoints(pts.len()));
    }
    if pts.windows(2).any(|w| w[0].ell >= w[1].ell) {
        return Err(FitError::NotIncreasing);
    }
    if pts.iter().all(|s| s.fill == pts[0].fill) {
        return Err(FitError::Degenerate(pts[0].fill));
    }
    if let Some(s) = pts.iter().find(|s| s.fill == 0) {
        return Err(FitError::NonPositive(s.ell));
    }
    let xs: Vec<f64> = pts.iter().map(|s| (s.ell as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|s| (s.fill as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    Ok(GrowthProfile {
        samples: samples.to_vec(),
        exponent: slope,
        window: (pts[0].ell, pts[pts.len() - 1].ell),
        residual: (sse / n).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthComparison {
    /// The constant with the fewest failures (the smallest such); it works iff `holds`.
    pub c: u64,
    pub holds: bool,
    pub failures: Vec<u64>,
    /// Some `g(Cn + C)` lay beyond g's samples and came from its power-law extension.
    pub extrapolated: bool,
}

struct Extension {
    samples: Vec<ProfileSample>,
    exponent: f64,
}

impl Extension {
    fn new(g: &[ProfileSample]) -> Self {
        let exponent = growth_fit(g, None).map(|p| p.exponent.max(0.0)).unwrap_or(0.0);
        Extension { samples: g.to_vec(), exponent }
    }

    /// Step interpolation inside the range, anchored power law beyond it; the flag marks extrapolation.
    fn eval(&self, x: u64) -> (f64, bool) {
        let Some(last) = self.samples.last() else { return (0.0, false) };
        if x > last.ell {
            let grown = last.fill as f64 * (x as f64 / last.ell as f64).powf(self.exponent);
            return (grown.max(last.fill as f64), true);
        }
        let v = self.samples.iter().take_while(|s| s.ell <= x).last().map_or(0, |s| s.fill);
        (v as f64, false)
    }
}

/// Searches `C = 1..=cmax` for `f ≺ g` on f's sampled lengths.
pub fn compare_growth(f: &[ProfileSample], g: &[ProfileSample], cmax: u64) -> GrowthComparison {
    assert!(cmax >= 1);
    let ext = Extension::new(g);
    let mut best: Option<(u64, Vec<u64>, bool)> = None;
    for c in 1..=cmax {
        let mut failures = Vec::new();
        let mut extrapolated = false;
        for s in f {
            let (gv, ex) = ext.eval(c * s.ell + c);
            extrapolated |= ex;
            let rhs = c as f64 * gv + (c * s.ell + c) as f64;
            if s.fill as f64 > rhs {
                failures.push(s.ell);
            }
        }
        let better = best.as_ref().is_none_or(|(_, f0, _)| failures.len() < f0.len());
        if better {
            best = Some((c, failures, extrapolated));
        }
        if best.as_ref().is_some_and(|b| b.1.is_empty()) {
            break;
        }
    }
    let (c, failures, extrapolated) = best.expect("cmax >= 1");
    GrowthComparison { c, holds: failures.is_empty(), failures, extrapolated }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(pairs: &[(u64, u64)]) -> Vec<ProfileSample> {
        pairs.iter().map(|&(ell, fill)| ProfileSample { ell, fill, count: 1, certified: true }).collect()
    }

    #[test]
    fn exact_square_law() {
        let s = samples(&(8..=40).step_by(4).map(|l| (l, l * l / 16)).collect::<Vec<_>>());
        let p = growth_fit(&s, None).unwrap();
        assert!((p.exponent - 2.0).abs() < 0.01, "{}", p.exponent);
        assert!(p.residual < 1e-9);
        assert_eq!(p.window, (8, 40));
    }

    #[test]
    fn fit_errors() {
        assert_eq!(growth_fit(&samples(&[(8, 3), (9, 3), (10, 3), (12, 3)]), None), Err(FitError::Degenerate(3)));
        assert_eq!(growth_fit(&samples(&[(8, 0), (9, 0), (10, 0), (12, 0)]), None), Err(FitError::Degenerate(0)));
        assert_eq!(growth_fit(&samples(&[(8, 3), (9, 3), (10, 4)]), None), Err(FitError::TooFewPoints(3)));
        assert_eq!(growth_fit(&samples(&[(8, 0), (9, 1), (10, 2), (12, 3)]), None), Err(FitError::NonPositive(8)));
        assert_eq!(growth_fit(&samples(&[(8, 1), (8, 2), (10, 3), (12, 4)]), None), Err(FitError::NotIncreasing));
        // small lengths are left out by default
        assert_eq!(growth_fit(&samples(&[(2, 1), (4, 2), (6, 3), (8, 4)]), None), Err(FitError::TooFewPoints(1)));
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(8, 40, 8);
        assert_eq!((g[0], *g.last().unwrap()), (8, 40));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(log_grid(8, 10, 8), vec![8, 9, 10]);
    }

    #[test]
    fn reflexive_and_linear_below_quadratic() {
        let quad = samples(&(8..=40).step_by(4).map(|l| (l, l * l / 16)).collect::<Vec<_>>());
        let lin = samples(&(8..=40).step_by(4).map(|l| (l, l / 6)).collect::<Vec<_>>());
        let r = compare_growth(&quad, &quad, 8);
        assert_eq!((r.c, r.holds), (1, true));
        let r = compare_growth(&lin, &quad, 8);
        assert!(r.holds && r.c == 1);
    }

    #[test]
    fn quadratic_over_linear_needs_long_range() {
        // on l <= 40 the additive Cn + C term absorbs l^2/16, so C = 2 already works
        let lin = samples(&(8..=40).step_by(4).map(|l| (l, l / 6)).collect::<Vec<_>>());
        let quad = samples(&(8..=40).step_by(4).map(|l| (l, l * l / 16)).collect::<Vec<_>>());
        let r = compare_growth(&quad, &lin, 8);
        assert_eq!((r.c, r.holds), (2, true));
        // out to l = 800 no C <= 8 survives
        let long = samples(&(8..=800).step_by(8).map(|l| (l, l * l / 16)).collect::<Vec<_>>());
        let r = compare_growth(&long, &lin, 8);
        assert!(!r.holds);
        assert!(r.extrapolated);
        assert_eq!(r.c, 8);
    }

    #[test]
    fn empty_g_is_zero() {
        let f = samples(&[(8, 0), (16, 0)]);
        let r = compare_growth(&f, &[], 4);
        assert!(r.holds);
    }
}

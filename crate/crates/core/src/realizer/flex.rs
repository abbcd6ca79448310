//! One-parameter families of placements and their extrema.

use std::fmt;
use std::sync::Arc;

use super::RealizeError;

/// Width to which golden-section refinement narrows a bracket.
pub const REFINE_WIDTH: f64 = 1e-10;

/// `coeffs . params = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// Named angle parameters, an optional linear relation between them, and an objective
/// (typically a distance between two placed vertices) over a parameter box.
#[derive(Clone)]
pub struct FlexSystem {
    pub params: Vec<String>,
    pub domain: Vec<(f64, f64)>,
    pub constraint: Option<LinearConstraint>,
    pub objective: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for FlexSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlexSystem")
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("constraint", &self.constraint)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlexExtrema {
    pub min: f64,
    pub argmin: Vec<f64>,
    pub max: f64,
    pub argmax: Vec<f64>,
}

impl FlexSystem {
    /// Reduces the system to a single free parameter `t` on an interval, returning the
    /// interval and the map from `t` to a full parameter vector.
    fn reduce(&self) -> Result<((f64, f64), Box<dyn Fn(f64) -> Vec<f64> + '_>), RealizeError> {
        if self.params.len() != self.domain.len() {
            return Err(RealizeError::Unsupported("domain does not match parameters".into()));
        }
        for &(lo, hi) in &self.domain {
            if !(lo <= hi) {
                return Err(RealizeError::EmptyDomain);
            }
        }
        match (self.params.len(), &self.constraint) {
            (1, None) => Ok((self.domain[0], Box::new(|t| vec![t]))),
            (2, Some(c)) if c.coeffs.len() == 2 && c.coeffs[1] != 0.0 => {
                let (a0, a1, rhs) = (c.coeffs[0], c.coeffs[1], c.rhs);
                let second = move |t: f64| (rhs - a0 * t) / a1;
                // t-range on which the second parameter stays inside its own bounds.
                let (lo1, hi1) = self.domain[1];
                let (mut lo, mut hi) = self.domain[0];
                if a0 == 0.0 {
                    let s = rhs / a1;
                    if s < lo1 || s > hi1 {
                        return Err(RealizeError::EmptyDomain);
                    }
                } else {
                    let t1 = (rhs - a1 * lo1) / a0;
                    let t2 = (rhs - a1 * hi1) / a0;
                    lo = lo.max(t1.min(t2));
                    hi = hi.min(t1.max(t2));
                }
                if lo > hi {
                    return Err(RealizeError::EmptyDomain);
                }
                Ok(((lo, hi), Box::new(move |t| vec![t, second(t)])))
            }
            (m, _) => Err(RealizeError::Unsupported(format!("{m} parameters without a reducing constraint"))),
        }
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_min(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Dense uniform scan of the objective followed by golden-section refinement of the best
/// sample in each direction.
pub fn flex_scan(fs: &FlexSystem, samples: usize) -> Result<FlexExtrema, RealizeError> {
    if samples < 3 {
        return Err(RealizeError::TooFewSamples(samples));
    }
    let ((lo, hi), full) = fs.reduce()?;
    let obj = |t: f64| (fs.objective)(&full(t));
    let step = (hi - lo) / (samples - 1) as f64;
    let ts: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { hi } else { lo + step * i as f64 }).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| obj(t)).collect();
    let bracket = |i: usize| (ts[i.saturating_sub(1)], ts[(i + 1).min(samples - 1)]);

    let imin = (0..samples).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let imax = (0..samples).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let (a, b) = bracket(imin);
    let (tmin, mut vmin) = golden_min(&mut |t| obj(t), a, b, REFINE_WIDTH);
    let mut tmin = tmin;
    if vals[imin] < vmin {
        tmin = ts[imin];
        vmin = vals[imin];
    }
    let (a, b) = bracket(imax);
    let (tmax, neg) = golden_min(&mut |t| -obj(t), a, b, REFINE_WIDTH);
    let (mut tmax, mut vmax) = (tmax, -neg);
    if vals[imax] > vmax {
        tmax = ts[imax];
        vmax = vals[imax];
    }
    Ok(FlexExtrema { min: vmin, argmin: full(tmin), max: vmax, argmax: full(tmax) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_objective() {
        let fs = FlexSystem {
            params: vec!["t".into()],
            domain: vec![(0.0, 1.0)],
            constraint: None,
            objective: Arc::new(|_| 2.5),
        };
        let e = flex_scan(&fs, 11).unwrap();
        assert_eq!(e.min, e.max);
    }

    #[test]
    fn constrained_pair() {
        let third = std::f64::consts::FRAC_PI_3;
        let fs = FlexSystem {
            params: vec!["a".into(), "b".into()],
            domain: vec![(0.0, third), (0.0, third)],
            constraint: Some(LinearConstraint { coeffs: vec![1.0, 1.0], rhs: third }),
            objective: Arc::new(|p| (p[0] - p[1]).powi(2)),
        };
        let e = flex_scan(&fs, 31).unwrap();
        assert!(e.min < 1e-18);
        assert!((e.argmin[0] - third / 2.0).abs() < 1e-9);
        assert!((e.max - third * third).abs() < 1e-12);
    }

    #[test]
    fn empty_domain() {
        let fs = FlexSystem {
            params: vec!["a".into(), "b".into()],
            domain: vec![(0.0, 1.0), (0.0, 1.0)],
            constraint: Some(LinearConstraint { coeffs: vec![1.0, 1.0], rhs: 5.0 }),
            objective: Arc::new(|_| 0.0),
        };
        assert_eq!(flex_scan(&fs, 5).unwrap_err(), RealizeError::EmptyDomain);
        assert_eq!(flex_scan(&fs, 2).unwrap_err(), RealizeError::TooFewSamples(2));
    }
}

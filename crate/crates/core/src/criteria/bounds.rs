//! Closed-form bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("k = {0} is below 3")]
    KTooSmall(i64),
    #[error("tau = {0} has no bounds row")]
    UnsupportedTau(i64),
    #[error("need n2 >= n4 >= 3, got n2 = {n2}, n4 = {n4}")]
    BadCutArguments { n2: i64, n4: i64 },
}

/// Largest area of a `k`-gon with unit sides, in units of the unit triangle area.
pub fn area_upper(k: i64) -> Result<f64, BoundError> {
    if k < 3 {
        return Err(BoundError::KTooSmall(k));
    }
    let kf = k as f64;
    Ok(kf / (std::f64::consts::PI / kf).tan() / 3f64.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub tau: i64,
    pub min_k: i64,
    pub min_a3: i64,
    pub min_area: i64,
    pub min_n: i64,
    pub single_vertex_allowed: bool,
}

pub const BOUNDS_TABLE: [BoundsRow; 3] = [
    BoundsRow { tau: 0, min_k: 11, min_a3: 15, min_area: 17, min_n: 16, single_vertex_allowed: false },
    BoundsRow { tau: 2, min_k: 9, min_a3: 11, min_area: 13, min_n: 13, single_vertex_allowed: false },
    BoundsRow { tau: 4, min_k: 8, min_a3: 8, min_area: 10, min_n: 11, single_vertex_allowed: true },
];

pub fn bounds_row(tau: i64) -> Result<BoundsRow, BoundError> {
    BOUNDS_TABLE.iter().copied().find(|r| r.tau == tau).ok_or(BoundError::UnsupportedTau(tau))
}

/// `floor(k^4 / 4)`.
pub fn a4_upper_bound(k: i64) -> i64 {
    k.pow(4).div_euclid(4)
}

/// `floor(2k^2/3 + k^4/4 - 2)`, evaluated over the common denominator 12.
pub fn f4_upper_bound(k: i64) -> i64 {
    (8 * k * k + 3 * k.pow(4) - 24).div_euclid(12)
}

pub fn cut_decomposition_bound(n2: i64, n4: i64) -> Result<i64, BoundError> {
    if !(n2 >= n4 && n4 >= 3) {
        return Err(BoundError::BadCutArguments { n2, n4 });
    }
    Ok((2 * n2).min(2 * n4 + 2))
}

/// `2 * ceil(2 * sqrt(q))` in integer arithmetic.
pub fn quad_boundary_bound(q: usize) -> usize {
    // smallest c with c^2 >= 4q
    let mut c = (4.0 * q as f64).sqrt() as usize;
    while c * c < 4 * q {
        c += 1;
    }
    while c > 0 && (c - 1) * (c - 1) >= 4 * q {
        c -= 1;
    }
    2 * c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionCase {
    pub label: String,
    pub triangles: i64,
    pub subtracted: i64,
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionTrace {
    pub k: i64,
    /// Inner angles of the outer face that can belong to triangles.
    pub outer_budget: i64,
    /// Angles of one configuration that can belong to triangles.
    pub slot_cost: i64,
    pub cases: Vec<ExclusionCase>,
}

impl ExclusionTrace {
    pub fn constants(&self) -> [i64; 5] {
        [self.outer_budget, self.slot_cost, self.cases[0].margin, self.cases[1].margin, self.cases[2].margin]
    }
}

/// Replays the angle count that rules out `tau = 0, k = 10`.
pub fn tau0_k10_exclusion() -> ExclusionTrace {
    let k = 10;
    let outer_budget = 3 * k - 7;
    let slot_cost = super::patterns::templates()[0].angle_slots as i64;
    let inner_gon = |s: i64| 3 * s - 3;
    let case = |label: &str, a3: i64, sub: i64| ExclusionCase {
        label: label.to_string(),
        triangles: a3,
        subtracted: sub,
        margin: 3 * a3 - outer_budget - sub,
    };
    ExclusionTrace {
        k,
        outer_budget,
        slot_cost,
        cases: vec![
            case("A3=15, A5=1, A10=1", 15, inner_gon(5)),
            case("A3=16, A6=1, A10=1", 16, inner_gon(6)),
            case("A3=14, A10=1", 14, slot_cost),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_values() {
        assert!((area_upper(3).unwrap() - 1.0).abs() < 1e-12);
        assert!((area_upper(10).unwrap() - 17.77).abs() < 0.01);
        assert!(area_upper(9).unwrap() < 15.0);
        assert!(area_upper(2).is_err());
    }

    #[test]
    fn integer_bounds() {
        assert_eq!(a4_upper_bound(3), 20);
        assert_eq!(a4_upper_bound(4), 64);
        assert_eq!(a4_upper_bound(10), 2500);
        assert_eq!(f4_upper_bound(3), 24);
        assert_eq!(f4_upper_bound(7), 630);
        assert_eq!(cut_decomposition_bound(17, 17), Ok(34));
        assert_eq!(cut_decomposition_bound(3, 3), Ok(6));
        assert_eq!(cut_decomposition_bound(20, 17), Ok(36));
        assert!(cut_decomposition_bound(3, 4).is_err());
    }

    #[test]
    fn quad_bound() {
        assert_eq!(quad_boundary_bound(1), 4);
        assert_eq!(quad_boundary_bound(2), 6);
        assert_eq!(quad_boundary_bound(4), 8);
        assert_eq!(quad_boundary_bound(5), 10);
        assert_eq!(quad_boundary_bound(9), 12);
    }

    #[test]
    fn exclusion_constants() {
        assert_eq!(tau0_k10_exclusion().constants(), [23, 15, 10, 10, 4]);
    }

    #[test]
    fn table_rows() {
        assert_eq!(bounds_row(2).unwrap().min_k, 9);
        assert_eq!(bounds_row(6), Err(BoundError::UnsupportedTau(6)));
    }
}

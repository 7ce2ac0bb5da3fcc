//! Objective fixtures: admissible random rows and feasible points for
//! each of the four losses.

use kng::{DataBounds, Dataset, FeasibleDomain, ObjectiveSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{l1, l2};

/// Draws one admissible row `(x, y)`.
pub type RowFn = fn(&mut ChaCha8Rng, usize) -> (Vec<f64>, Option<f64>);

pub struct Case {
    pub spec: ObjectiveSpec,
    pub n: usize,
    pub row: RowFn,
}

pub fn unit_box(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| r.random_range(-1.0..=1.0)).collect()
}

pub fn mean_row(r: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Option<f64>) {
    // Uniform in the unit Euclidean ball, sometimes pushed to the sphere.
    loop {
        let mut x = unit_box(r, d);
        let len = l2(&x);
        if len <= 1.0 && len > 0.0 {
            if r.random::<f64>() < 0.3 {
                x.iter_mut().for_each(|v| *v /= len);
                while l2(&x) > 1.0 {
                    x.iter_mut().for_each(|v| *v *= 1.0 - f64::EPSILON);
                }
            }
            return (x, None);
        }
    }
}

pub fn median_row(r: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Option<f64>) {
    (unit_box(r, d), None)
}

pub fn regression_row(r: &mut ChaCha8Rng, d: usize) -> (Vec<f64>, Option<f64>) {
    let mut x = unit_box(r, d);
    if r.random::<f64>() < 0.3 {
        x.iter_mut().for_each(|v| *v = v.signum());
    }
    let y = if r.random::<f64>() < 0.3 { r.random_range(-1.0..=1.0f64).signum() } else { r.random_range(-1.0..=1.0) };
    (x, Some(y))
}

pub fn cases() -> Vec<Case> {
    vec![
        Case { spec: ObjectiveSpec::mean_sse(3, 1.0).unwrap(), n: 8, row: mean_row },
        Case { spec: ObjectiveSpec::linear_sse(3, 1.0).unwrap(), n: 8, row: regression_row },
        Case { spec: ObjectiveSpec::geometric_median(2, 1.0).unwrap(), n: 8, row: median_row },
        Case { spec: ObjectiveSpec::quantile_loss(2, 0.5, 1.0, 1.0).unwrap(), n: 8, row: regression_row },
        Case { spec: ObjectiveSpec::quantile_loss(2, 0.8, 1.0, 1.0).unwrap(), n: 8, row: regression_row },
        Case { spec: ObjectiveSpec::quantile_loss(2, 0.2, 1.0, 1.0).unwrap(), n: 8, row: regression_row },
    ]
}

pub fn dataset(case: &Case, r: &mut ChaCha8Rng) -> Dataset {
    let d = case.spec.dim();
    let rows: Vec<(Vec<f64>, Option<f64>)> = (0..case.n).map(|_| (case.row)(r, d)).collect();
    let x: Vec<Vec<f64>> = rows.iter().map(|(x, _)| x.clone()).collect();
    let y: Option<Vec<f64>> = rows.iter().map(|(_, y)| *y).collect();
    Dataset::from_rows(&x, y, DataBounds::default()).unwrap()
}

pub fn feasible_point(domain: &FeasibleDomain, r: &mut ChaCha8Rng) -> Vec<f64> {
    match domain {
        FeasibleDomain::L1Ball { dim, radius } => loop {
            let t: Vec<f64> = (0..*dim).map(|_| r.random_range(-radius..=*radius)).collect();
            if l1(&t) <= *radius {
                return t;
            }
        },
        FeasibleDomain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| r.random_range(*a..=*b)).collect(),
        FeasibleDomain::Interval { lo, hi } => vec![r.random_range(*lo..=*hi)],
    }
}

pub fn smooth_point(spec: &ObjectiveSpec, data: &Dataset, r: &mut ChaCha8Rng, h: f64) -> Vec<f64> {
    loop {
        let theta = feasible_point(spec.domain(), r);
        let clear = match spec.kind().name() {
            "median" => data.rows().all(|x| l2(&x.iter().zip(&theta).map(|(a, b)| a - b).collect::<Vec<_>>()) > 1e-3),
            "quantile" => {
                let y = data.y().unwrap();
                data.rows().zip(y).all(|(x, yi)| {
                    let fit: f64 = x.iter().zip(&theta).map(|(a, b)| a * b).sum();
                    (yi - fit).abs() > 10.0 * h * l1(x)
                })
            }
            _ => true,
        };
        if clear {
            return theta;
        }
    }
}

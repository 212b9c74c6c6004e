//! Fractional knapsack by density-greedy.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    values: Vec<f64>,
    weights: Vec<f64>,
    capacity: f64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, capacity: f64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {i} must be positive and finite, got {}",
                weights[i]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("value {i} is not finite")));
        }
        if !(capacity.is_finite() && capacity >= 0.0) {
            return Err(Error::invalid(format!(
                "capacity must be finite and non-negative, got {capacity}"
            )));
        }
        Ok(Self {
            values,
            weights,
            capacity,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackSolution {
    /// Fraction of each item taken, in `[0, 1]`.
    pub x: Vec<f64>,
    pub objective: f64,
}

impl KnapsackSolution {
    /// Items taken in full (`x_i = 1`), ascending.
    pub fn selected(&self) -> Vec<usize> {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == 1.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// The single partially taken item, if any.
    pub fn fractional(&self) -> Option<usize> {
        self.x.iter().position(|&x| x > 0.0 && x < 1.0)
    }

    pub fn used_capacity(&self, inst: &KnapsackInstance) -> f64 {
        self.x.iter().zip(&inst.weights).map(|(x, w)| x * w).sum()
    }
}

/// LP optimum of the fractional knapsack.
///
/// Items go in by decreasing `value / weight` (ties to the lower index) until
/// the next one does not fit; that item is taken fractionally and the scan
/// stops. At most one `x_i` ends strictly between 0 and 1.
pub fn solve_fractional_knapsack(inst: &KnapsackInstance) -> KnapsackSolution {
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.sort_by(|&a, &b| {
        let da = inst.values[a] / inst.weights[a];
        let db = inst.values[b] / inst.weights[b];
        db.total_cmp(&da).then(a.cmp(&b))
    });

    let mut x = vec![0.0; inst.len()];
    let mut left = inst.capacity;
    let mut objective = 0.0;
    for i in order {
        let w = inst.weights[i];
        if w <= left {
            x[i] = 1.0;
            left -= w;
            objective += inst.values[i];
        } else {
            let part = left / w;
            if part > 0.0 {
                x[i] = part;
                objective += part * inst.values[i];
            }
            break;
        }
    }
    KnapsackSolution { x, objective }
}

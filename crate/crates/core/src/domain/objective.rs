use serde::{Deserialize, Serialize};

/// What happened in one slice as far as the objective is concerned: the
/// values of requests delivered and the lengths of legs dispatched.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SliceRecord {
    pub delivered_values: Vec<f64>,
    pub leg_distances: Vec<u32>,
}

impl SliceRecord {
    /// Contribution of this slice: delivered value minus travel cost.
    pub fn reward(&self, cost_rate: f64) -> f64 {
        let value: f64 = self.delivered_values.iter().sum();
        let distance: u64 = self.leg_distances.iter().map(|&d| d as u64).sum();
        value - cost_rate * distance as f64
    }
}

/// Profit of delivered requests minus cost per unit distance of every
/// dispatched leg, accumulated slice by slice.
pub fn objective_value(history: &[SliceRecord], cost_rate: f64) -> f64 {
    history
        .iter()
        .fold(0.0, |acc, slice| acc + slice.reward(cost_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_history_is_zero() {
        assert_eq!(objective_value(&[], 0.3), 0.0);
    }

    #[test]
    fn single_delivery_and_leg() {
        let h = [SliceRecord {
            delivered_values: vec![5.0],
            leg_distances: vec![1],
        }];
        assert!((objective_value(&h, 0.3) - 4.7).abs() < 1e-12);
    }

    #[test]
    fn cost_free_sum() {
        let h = [
            SliceRecord {
                delivered_values: vec![3.0],
                leg_distances: vec![4],
            },
            SliceRecord {
                delivered_values: vec![4.0],
                leg_distances: vec![],
            },
        ];
        assert_eq!(objective_value(&h, 0.0), 7.0);
    }
}

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Measured `(omega_n - omega_{n-1}) / 2 pi` of the device, in GHz, for
/// `n = 1..=8`.
pub const TABLE_S1_GHZ: [f64; 8] = [4.870, 4.766, 4.658, 4.544, 4.424, 4.298, 4.163, 4.020];

/// Transmon levels used as the qudit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpec {
    /// `(omega_n - omega_{n-1}) / 2 pi` in Hz for `n = 1..`.
    pub transition_freqs: Vec<f64>,
    /// Charge matrix elements `gamma_n`; defaults to `sqrt(n)`.
    #[serde(default)]
    pub charge_elements: Option<Vec<f64>>,
}

impl Default for TransmonSpec {
    fn default() -> Self {
        Self::table_s1()
    }
}

impl TransmonSpec {
    pub fn table_s1() -> Self {
        Self {
            transition_freqs: TABLE_S1_GHZ.iter().map(|f| f * 1e9).collect(),
            charge_elements: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.transition_freqs.is_empty() {
            return Err(invalid("transition_freqs", "need at least one transition"));
        }
        if self.transition_freqs.iter().any(|f| !(*f > 0.0)) {
            return Err(invalid("transition_freqs", "frequencies must be positive"));
        }
        if self.transition_freqs.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid(
                "transition_freqs",
                "must decrease strictly with level (negative anharmonicity)",
            ));
        }
        if let Some(g) = &self.charge_elements {
            if g.len() != self.transition_freqs.len() {
                return Err(invalid("charge_elements", "one entry per transition required"));
            }
            if g.iter().any(|x| !(*x > 0.0)) {
                return Err(invalid("charge_elements", "must be positive"));
            }
        }
        Ok(())
    }

    /// Number of usable levels.
    pub fn levels(&self) -> usize {
        self.transition_freqs.len() + 1
    }

    /// `omega_n` in rad/s with `omega_0 = 0`.
    pub fn level_freqs(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut acc = 0.0;
        for f in &self.transition_freqs {
            acc += 2.0 * PI * f;
            out.push(acc);
        }
        out
    }

    /// `omega_n - omega_{n-1}` in rad/s for transition `n >= 1`.
    pub fn transition_freq(&self, n: usize) -> f64 {
        2.0 * PI * self.transition_freqs[n - 1]
    }

    /// `gamma_n` for transition `n >= 1`.
    pub fn charge_element(&self, n: usize) -> f64 {
        match &self.charge_elements {
            Some(g) => g[n - 1],
            None => (n as f64).sqrt(),
        }
    }

    /// `(omega_2 - omega_1) - (omega_1 - omega_0)` in Hz.
    pub fn anharmonicity(&self) -> f64 {
        match self.transition_freqs.as_slice() {
            [a, b, ..] => b - a,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        let t = TransmonSpec::table_s1();
        t.validate().unwrap();
        assert!((t.anharmonicity() + 104e6).abs() < 1.0);
        assert_eq!(t.levels(), 9);
        assert!((t.level_freqs()[2] / (2.0 * PI) - 9.636e9).abs() < 1.0);
        assert_eq!(t.charge_element(4), 2.0);
    }

    #[test]
    fn rejects_positive_anharmonicity() {
        let t = TransmonSpec {
            transition_freqs: vec![4e9, 4.1e9],
            charge_elements: None,
        };
        assert!(t.validate().is_err());
    }
}

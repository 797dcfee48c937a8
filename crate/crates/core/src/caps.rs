//! Resource caps for the various enumerations.
//!
//! Defaults guarantee desk-scale runtimes; every cap can be overridden
//! per request, or globally via the `HILBRES_CAPS` environment variable
//! (a comma-separated `key=value` list, handled by the CLI).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest `N` accepted by `cyclotomic_field`.
    pub cyclotomic_n: u32,
    /// Largest group order produced by subgroup closure.
    pub group_order: usize,
    /// Largest `k` for which the full `S_k` normalizer search runs
    /// without an explicit search subgroup.
    pub full_search_k: usize,
    /// Largest `k` for partition / staircase enumeration.
    pub partition_k: u64,
    /// Largest `k` for the full strata poset.
    pub poset_k: u64,
    /// Largest `n + 1` for the Kummer fixed-stratum enumeration.
    pub kummer_points: u64,
    /// Largest element order probed when classifying matrices.
    pub max_element_order: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            cyclotomic_n: 64,
            group_order: 1_000_000,
            full_search_k: 8,
            partition_k: 60,
            poset_k: 15,
            kummer_points: 12,
            max_element_order: 1024,
        }
    }
}

impl Caps {
    /// Apply a `key=value` override; unknown keys are reported back.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        macro_rules! parse {
            ($field:ident) => {{
                self.$field = value
                    .parse()
                    .map_err(|e| format!("bad value for {key}: {e}"))?;
            }};
        }
        match key {
            "cyclotomic_n" => parse!(cyclotomic_n),
            "group_order" => parse!(group_order),
            "full_search_k" => parse!(full_search_k),
            "partition_k" => parse!(partition_k),
            "poset_k" => parse!(poset_k),
            "kummer_points" => parse!(kummer_points),
            "max_element_order" => parse!(max_element_order),
            _ => return Err(format!("unknown cap {key}")),
        }
        Ok(())
    }
}

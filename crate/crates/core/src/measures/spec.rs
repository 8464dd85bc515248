//! JSON schema for measures.

use serde::{Deserialize, Serialize};

fn default_depth() -> u32 {
    30
}

/// One mixture component as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ComponentSpec {
    Atom { x: f64, w: f64 },
    Uniform { a: f64, b: f64, w: f64 },
    Normal { mean: f64, var: f64, w: f64 },
    Exponential { rate: f64, w: f64 },
    Cantor {
        a: f64,
        b: f64,
        #[serde(default = "default_depth")]
        depth: u32,
        w: f64,
    },
    /// Density proportional to `sum_i coeffs[i] * y^i` on `[a, b]`, scaled to mass `w`.
    Polynomial { a: f64, b: f64, coeffs: Vec<f64>, w: f64 },
}

/// A measure as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub components: Vec<ComponentSpec>,
}

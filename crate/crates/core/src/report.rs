//! Run reports and their JSON form.
//!
//! Complex numbers are written as exact `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::algebra::C64;
use crate::pointer::{ClickPattern, RegisterClick, WeakStats};
use crate::two_state::WeakValueResult;

pub(crate) mod complex {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub(crate) mod complex_opt {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
        z.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
        Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| C64::new(re, im)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub checksum: String,
    /// Register labels in the order they were coupled.
    pub coupling_order: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumRuleResult {
    pub stage: String,
    pub sites: Vec<String>,
    /// Sum of the weak values; `None` under degenerate postselection.
    #[serde(with = "complex_opt")]
    pub total: Option<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchAmplitude {
    /// Registers shifted in this branch.
    pub shifted: Vec<String>,
    #[serde(with = "complex")]
    pub amplitude: C64,
}

/// How pointers affect a vanishing transition amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceEntry {
    pub site: String,
    pub stage: String,
    /// `⟨χ|U Π U|ψ⟩` without pointers.
    #[serde(with = "complex")]
    pub undisturbed_amplitude: C64,
    /// Postselected amplitudes of the site's branch, per register pattern.
    pub branches: Vec<BranchAmplitude>,
    /// Physical norm of the site's postselected branch.
    pub branch_norm: f64,
    pub disturbed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: ScenarioInfo,
    pub weak_values: Vec<WeakValueResult>,
    #[serde(default)]
    pub sum_rules: Vec<SumRuleResult>,
    pub postselection_probability: f64,
    #[serde(default)]
    pub degenerate: bool,
    pub clicks: Vec<RegisterClick>,
    pub patterns: Vec<ClickPattern>,
    pub weak_stats: Vec<WeakStats>,
    pub disturbance: Vec<DisturbanceEntry>,
    pub tolerance: f64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn weak_value(&self, site: &str) -> Option<&WeakValueResult> {
        self.weak_values.iter().find(|w| w.site == site)
    }

    pub fn click_probability(&self, register: &str) -> Option<f64> {
        self.clicks
            .iter()
            .find(|c| c.register == register)
            .map(|c| c.probability)
    }

    pub fn weak_stats(&self, register: &str) -> Option<&WeakStats> {
        self.weak_stats.iter().find(|w| w.register == register)
    }

    pub fn disturbance(&self, site: &str) -> Option<&DisturbanceEntry> {
        self.disturbance.iter().find(|d| d.site == site)
    }
}

/// Formats a real number with `digits` significant digits, dropping
/// trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if exponent < -5 || exponent >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exponent}");
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `re+imi` with 12 significant digits per part.
pub fn format_complex(z: C64) -> String {
    let re = format_significant(z.re, 12);
    let im = format_significant(z.im.abs(), 12);
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(-1.0, 12), "-1");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(-0.0, 12), "0");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(-2.0 / 3.0, 12), "-0.666666666667");
        assert_eq!(format_significant(1.5e-17, 12), "1.5e-17");
        assert_eq!(format_significant(123456.5, 12), "123456.5");
        assert_eq!(format_significant(0.999999999999999, 12), "1");
    }

    #[test]
    fn complex_rendering() {
        assert_eq!(format_complex(C64::new(1.0, 0.0)), "1+0i");
        assert_eq!(format_complex(C64::new(-1.0, -0.0)), "-1+0i");
        assert_eq!(format_complex(C64::new(0.5, -0.25)), "0.5-0.25i");
    }
}

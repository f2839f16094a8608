//! JSON run configuration. Keys mirror the long flag names; any key given on
//! the command line wins over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "alphaT")]
    pub alpha_t: Option<f64>,
    #[serde(rename = "deltaT")]
    pub delta_t: Option<f64>,
    #[serde(rename = "gammaT")]
    pub gamma_t: Option<f64>,
    #[serde(rename = "tmaxT")]
    pub tmax_t: Option<f64>,
    pub sequence: Option<String>,
    pub model: Option<String>,
    pub basis: Option<String>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub nplus: Option<f64>,
    pub nminus: Option<f64>,
    #[serde(rename = "omega4T")]
    pub omega4_t: Option<f64>,
    pub gammas: Option<Vec<f64>>,
    pub models: Option<Vec<String>>,
    pub analytic: Option<bool>,
    pub workers: Option<usize>,
    pub variant: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Flag value, else config value, else default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Parse an enum-valued setting coming from either source.
pub fn pick_parsed<T>(flag: Option<T>, config: Option<&str>, default: T, key: &str) -> Result<T, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    match (flag, config) {
        (Some(v), _) => Ok(v),
        (None, Some(s)) => s.parse().map_err(|e| format!("config key `{key}`: {e}")),
        (None, None) => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        assert_eq!(pick(Some(1.0), Some(2.0), 3.0), 1.0);
        assert_eq!(pick(None, Some(2.0), 3.0), 2.0);
        assert_eq!(pick(None, None, 3.0), 3.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ConfigFile>(r#"{"alphaT": 5, "beta": 1}"#).is_err());
        let c: ConfigFile = serde_json::from_str(r#"{"alphaT": 5, "sequence": "intuitive"}"#).unwrap();
        assert_eq!(c.alpha_t, Some(5.0));
    }

    #[test]
    fn enum_values_parse_from_config() {
        use stirap_core::Sequence;
        let s = pick_parsed(None, Some("intuitive"), Sequence::Counterintuitive, "sequence").unwrap();
        assert_eq!(s, Sequence::Intuitive);
        assert!(pick_parsed::<Sequence>(None, Some("sideways"), Sequence::Intuitive, "sequence").is_err());
    }
}

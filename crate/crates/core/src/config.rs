//! Run configuration: complex-number literals, `key = value` config files and
//! the merged [`RunConfig`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::c64;

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "TWISTED_XXX_SEED";
pub const DEFAULT_SEED: u64 = 20_260_516;
pub const MAX_SITES: usize = 12;

/// Parses `a`, `a+bi`, `a-bi`, `bi` (decimal reals, exponents allowed).
pub fn parse_complex(s: &str) -> Result<c64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("not a complex literal: '{s}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let real = |x: &str| x.parse::<f64>().map_err(|_| bad());
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c64::new(real(&t)?, 0.0));
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag_part = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(x),
        }
    };
    let z = match split {
        Some(k) => c64::new(real(&body[..k])?, imag_part(&body[k..])?),
        None => c64::new(0.0, imag_part(body)?),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

pub fn format_complex(z: c64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::Config(format!("unknown boundary '{other}'"))),
        }
    }
}

/// How `xi` is drawn when it is not fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XiSampling {
    /// Uniform on `[−1, 1]`.
    Real,
    /// Uniform on the unit disk.
    Disk,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub n_sites: usize,
    /// Fixed deformation parameter; sampled per check when absent.
    #[serde(serialize_with = "ser_opt_complex")]
    pub xi: Option<c64>,
    #[serde(serialize_with = "ser_complex")]
    pub eta: c64,
    pub boundary: Boundary,
    /// Overrides the per-suite sample count.
    pub samples: Option<usize>,
    pub xi_sampling: XiSampling,
    pub tolerance_overrides: BTreeMap<String, f64>,
}

fn ser_complex<S: serde::Serializer>(z: &c64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_complex(*z))
}

fn ser_opt_complex<S: serde::Serializer>(z: &Option<c64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match z {
        Some(z) => s.serialize_str(&format_complex(*z)),
        None => s.serialize_none(),
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n_sites: 4,
            xi: None,
            eta: c64::new(1.0, 0.0),
            boundary: Boundary::Periodic,
            samples: None,
            xi_sampling: XiSampling::Real,
            tolerance_overrides: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 || self.n_sites > MAX_SITES {
            return Err(Error::Config(format!("n_sites must be in 1..={MAX_SITES}")));
        }
        if self.samples == Some(0) {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.eta == c64::new(0.0, 0.0) {
            return Err(Error::Config("eta must be nonzero".into()));
        }
        if let Some((k, v)) = self.tolerance_overrides.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("tolerance override {k} = {v} must be positive")));
        }
        Ok(())
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerance_overrides.get(check).copied().unwrap_or(default)
    }

    /// Applies `key = value` lines. Unknown keys are errors. Tolerance
    /// overrides use `tolerance.<check_id> = value`.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let ctx = |e: Error| Error::Config(format!("line {}: {e}", lineno + 1));
            let int = |v: &str| v.parse::<usize>().map_err(|_| Error::Config(format!("bad integer '{v}'")));
            match k {
                "seed" => self.seed = v.parse().map_err(|_| ctx(Error::Config(format!("bad seed '{v}'"))))?,
                "n_sites" => self.n_sites = int(v).map_err(ctx)?,
                "xi" => self.xi = Some(parse_complex(v).map_err(ctx)?),
                "eta" => self.eta = parse_complex(v).map_err(ctx)?,
                "boundary" => self.boundary = v.parse().map_err(ctx)?,
                "samples" => self.samples = Some(int(v).map_err(ctx)?),
                "xi_sampling" => {
                    self.xi_sampling = match v {
                        "real" => XiSampling::Real,
                        "disk" => XiSampling::Disk,
                        other => return Err(ctx(Error::Config(format!("unknown xi_sampling '{other}'")))),
                    }
                }
                _ => {
                    if let Some(check) = k.strip_prefix("tolerance.") {
                        let x: f64 = v
                            .parse()
                            .map_err(|_| ctx(Error::Config(format!("bad tolerance '{v}'"))))?;
                        self.tolerance_overrides.insert(check.to_string(), x);
                    } else {
                        return Err(ctx(Error::Config(format!("unknown key '{k}'"))));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn load_kv_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_kv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), c64::new(1.5, 0.0));
        assert_eq!(parse_complex("1.5+2i").unwrap(), c64::new(1.5, 2.0));
        assert_eq!(parse_complex("-0.25-0.5i").unwrap(), c64::new(-0.25, -0.5));
        assert_eq!(parse_complex("2i").unwrap(), c64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5e2i").unwrap(), c64::new(1e-3, 250.0));
        assert_eq!(parse_complex(" 3 - 4i ").unwrap(), c64::new(3.0, -4.0));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn format_round_trips() {
        for z in [c64::new(0.1, -0.3), c64::new(-2.0, 0.0), c64::new(1e-17, 4.5e10)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn kv_file() {
        let mut c = RunConfig::default();
        c.apply_kv("# comment\nseed = 9\nn_sites=5\nxi = 0.5-0.1i\nboundary = open\ntolerance.ybe = 1e-10\n")
            .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.n_sites, 5);
        assert_eq!(c.xi, Some(c64::new(0.5, -0.1)));
        assert_eq!(c.boundary, Boundary::Open);
        assert_eq!(c.tolerance("ybe", 1.0), 1e-10);
        assert!(c.clone().apply_kv("bogus = 1").is_err());
        assert!(c.clone().apply_kv("n_sites").is_err());
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::default();
        assert!(c.validate().is_ok());
        c.n_sites = 13;
        assert!(c.validate().is_err());
        c.n_sites = 3;
        c.samples = Some(0);
        assert!(c.validate().is_err());
    }
}

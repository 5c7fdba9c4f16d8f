//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use rd3_bvp::{NewtonOptions, Resolution, StepControl};
use rd3_core::asymptotic1::Order;
use rd3_core::melnikov::RegionGrid;
use rd3_core::{Branch, Exec, SystemParams};

use crate::error::{CliError, Result};

const KEYS: &[&str] = &[
    "eps", "A", "A0", "A1", "B", "B1", "C", "C1", "D", "L", "out", "thm", "branch", "order", "root", "samples",
    "intervals", "stages", "tol", "max_iter", "exec", "ds", "ds_min", "ds_max", "max_steps", "a_min", "a_max",
    "direction", "n", "lo", "hi", "a_lo", "a_hi", "hopf_tol",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub out: PathBuf,
    pub thm: u8,
    pub branch: Branch,
    pub order: Order,
    pub root: usize,
    pub samples: usize,
    pub resolution: Resolution,
    pub newton: NewtonOptions,
    pub step: StepControl,
    pub direction: f64,
    pub grid: RegionGrid,
    /// Search window for the Turing onset; defaults to ±0.1 around the curve.
    pub a_lo: Option<f64>,
    pub a_hi: Option<f64>,
    pub hopf_tol: f64,
}

fn normalize_key(k: &str) -> String {
    k.trim()
        .chars()
        .map(|c| match c {
            '₀' => '0',
            '₁' => '1',
            c => c,
        })
        .collect::<String>()
        .replace('ε', "eps")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_pair(line).map_err(|e| CliError::Domain(format!("line {}: {e}", k + 1)))?);
    }
    Ok(out)
}

pub fn parse_pair(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Domain(format!("expected key=value, got '{s}'")))?;
    let k = normalize_key(k);
    if !KEYS.contains(&k.as_str()) {
        return Err(CliError::Domain(format!("unknown key '{k}'")));
    }
    Ok((k, v.trim().to_string()))
}

struct Table(BTreeMap<String, String>);

impl Table {
    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| CliError::Domain(format!("bad value for {key}: '{v}'"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }
}

impl RunConfig {
    /// Later pairs override earlier ones; `env_out` (from `RD3_OUT`) overrides `out`.
    pub fn from_pairs(pairs: Vec<(String, String)>, env_out: Option<String>) -> Result<Self> {
        let t = Table(pairs.into_iter().collect());

        let eps = t.or("eps", 0.01)?;
        if t.has("A") && (t.has("A0") || t.has("A1")) {
            return Err(CliError::Domain("give either A or A0/A1".into()));
        }
        if t.has("B") && t.has("B1") || t.has("C") && t.has("C1") {
            return Err(CliError::Domain("give either B or B1, and either C or C1".into()));
        }
        let thm: u8 = t.or("thm", 3)?;
        if !(1..=3).contains(&thm) {
            return Err(CliError::Domain(format!("thm must be 1, 2 or 3, got {thm}")));
        }
        // the small-A construction has its own reference point A1 = 1
        let (a0_default, a1_default) = if thm == 2 { (0.0, 1.0) } else { (0.3, 0.0) };
        let (a0, a1) = match t.get::<f64>("A")? {
            Some(a) => (a, 0.0),
            None => (t.or("A0", a0_default)?, t.or("A1", a1_default)?),
        };
        let b1 = match t.get::<f64>("B")? {
            Some(b) => b / eps,
            None => t.or("B1", 1.0)?,
        };
        let c1 = match t.get::<f64>("C")? {
            Some(c) => c / eps,
            None => t.or("C1", 0.0)?,
        };
        let params = SystemParams::small_bc(eps, a0, a1, b1, c1, t.or("D", 3.0)?, t.or("L", 5.0)?)?;

        let out = PathBuf::from(env_out.unwrap_or(t.or("out", "rd3_out".to_string())?));
        let branch = match t.or("branch", "plus".to_string())?.as_str() {
            "plus" | "+" => Branch::Plus,
            "minus" | "-" => Branch::Minus,
            s => return Err(CliError::Domain(format!("branch must be plus or minus, got '{s}'"))),
        };
        let order = match t.or("order", "first".to_string())?.as_str() {
            "leading" | "0" => Order::Leading,
            "first" | "1" => Order::FirstCorrected,
            s => return Err(CliError::Domain(format!("order must be leading or first, got '{s}'"))),
        };
        let exec = match t.or("exec", "parallel".to_string())?.as_str() {
            "parallel" => Exec::Parallel,
            "sequential" => Exec::Sequential,
            s => return Err(CliError::Domain(format!("exec must be parallel or sequential, got '{s}'"))),
        };

        let base = Resolution::for_eps(eps);
        let resolution = Resolution { intervals: t.or("intervals", base.intervals)?, stages: t.or("stages", base.stages)? };
        if resolution.intervals < 8 || !(1..=8).contains(&resolution.stages) {
            return Err(CliError::Domain("need intervals >= 8 and 1 <= stages <= 8".into()));
        }
        let nd = NewtonOptions::default();
        let newton = NewtonOptions { tol: t.or("tol", nd.tol)?, max_iter: t.or("max_iter", nd.max_iter)?, exec };

        let sd = StepControl::default();
        let step = StepControl {
            ds: t.or("ds", sd.ds)?,
            ds_min: t.or("ds_min", sd.ds_min)?,
            ds_max: t.or("ds_max", sd.ds_max)?,
            max_steps: t.or("max_steps", 60)?,
            a_min: t.or("a_min", sd.a_min)?,
            a_max: t.or("a_max", 1.0)?,
            newton: NewtonOptions { max_iter: sd.newton.max_iter, ..newton },
            ..sd
        };
        if !(step.ds > 0.0 && step.ds_min > 0.0 && step.ds_min <= step.ds && step.ds <= step.ds_max) {
            return Err(CliError::Domain("need 0 < ds_min <= ds <= ds_max".into()));
        }
        let direction: f64 = t.or("direction", 1.0)?;
        if direction == 0.0 || !direction.is_finite() {
            return Err(CliError::Domain("direction must be nonzero".into()));
        }

        let grid = RegionGrid { lo: t.or("lo", -10.0)?, hi: t.or("hi", 10.0)?, n: t.or("n", 200)? };
        if !(grid.lo < grid.hi) || grid.n < 2 {
            return Err(CliError::Domain("need lo < hi and n >= 2".into()));
        }
        let samples = t.or("samples", 2001)?;
        if samples < 2 {
            return Err(CliError::Domain("samples must be at least 2".into()));
        }

        Ok(RunConfig {
            params,
            out,
            thm,
            branch,
            order,
            root: t.or("root", 0)?,
            samples,
            resolution,
            newton,
            step,
            direction,
            grid,
            a_lo: t.get("a_lo")?,
            a_hi: t.get("a_hi")?,
            hopf_tol: t.or("hopf_tol", 1e-7)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[&str]) -> Result<RunConfig> {
        RunConfig::from_pairs(pairs.iter().map(|s| parse_pair(s).unwrap()).collect(), None)
    }

    #[test]
    fn defaults_are_the_reference_setup() {
        let c = cfg(&[]).unwrap();
        assert_eq!(c.params.eps, 0.01);
        assert!((c.params.b() - 0.01).abs() < 1e-15);
        assert_eq!((c.params.a(), c.params.c(), c.params.d, c.params.l), (0.3, 0.0, 3.0, 5.0));
        assert_eq!(c.thm, 3);
    }

    #[test]
    fn later_values_win_and_subscripts_alias() {
        let c = cfg(&["A₀=0.5", "A0=0.72", "L=4"]).unwrap();
        assert_eq!(c.params.a0, 0.72);
        assert_eq!(c.params.l, 4.0);
    }

    #[test]
    fn full_values_rescale() {
        let c = cfg(&["eps=0.02", "B=0.04", "C=-0.02"]).unwrap();
        assert!((c.params.b1 - 2.0).abs() < 1e-14 && (c.params.c1 + 1.0).abs() < 1e-14);
    }

    #[test]
    fn file_syntax() {
        let p = parse_text("# comment\n eps = 0.05 \n\nL=2 # trailing\n").unwrap();
        assert_eq!(p, vec![("eps".into(), "0.05".into()), ("L".into(), "2".into())]);
        assert!(parse_text("eps 0.05").is_err());
        assert!(parse_text("colour=blue").is_err());
    }

    #[test]
    fn invalid_values_are_domain_errors() {
        for bad in [&["D=0.5"][..], &["thm=4"], &["eps=abc"], &["A=0.2", "A1=1"], &["ds=1", "ds_max=0.1"]] {
            assert_eq!(cfg(bad).unwrap_err().exit_code(), 4, "{bad:?}");
        }
    }

    #[test]
    fn env_overrides_out() {
        let pairs = vec![parse_pair("out=here").unwrap()];
        let c = RunConfig::from_pairs(pairs, Some("there".into())).unwrap();
        assert_eq!(c.out, PathBuf::from("there"));
    }
}

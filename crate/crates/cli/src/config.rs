//! Simulation run configuration.
//!
//! A JSON object whose keys mirror the [`RunConfig`] field names. Every design
//! axis is a list and the grid is their cross product, with the first axis
//! varying slowest in the order `pair_mode, rho, n_a, n_b, n_c, var1, var2,
//! var_a, var_b, var_c, mu1, mu2, hyp_diff`.
//!
//! `rho`, `var1` and `var2` are used by `bivariate` cells; `var_a`, `var_b`
//! and `var_c` by `identical_pairs` cells, which fix ρ = 1.

use std::path::{Path, PathBuf};

use overlap_core::{DesignCell, PairMode, TestKind};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20_190_101;
pub const DEFAULT_REPS: u64 = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pair_mode: Vec<PairMode>,
    pub rho: Vec<f64>,
    pub n_a: Vec<usize>,
    pub n_b: Vec<usize>,
    pub n_c: Vec<usize>,
    pub var1: Vec<f64>,
    pub var2: Vec<f64>,
    pub var_a: Vec<f64>,
    pub var_b: Vec<f64>,
    pub var_c: Vec<f64>,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub hyp_diff: Vec<f64>,
    pub tests: Vec<TestKind>,
    pub reps: u64,
    pub alpha: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

const KEYS: &[&str] = &[
    "pair_mode", "rho", "n_a", "n_b", "n_c", "var1", "var2", "var_a", "var_b", "var_c", "mu1",
    "mu2", "hyp_diff", "tests", "reps", "alpha", "seed", "workers", "output_path",
    "output_format",
];

struct Fields<'a> {
    map: Map<String, Value>,
    path: &'a Path,
}

impl Fields<'_> {
    fn fail(&self, key: &str, msg: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.to_path_buf(),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| self.fail(key, e.to_string())),
        }
    }

    /// A non-empty list, or `default` when the key is absent.
    fn axis<T: DeserializeOwned>(&self, key: &str, default: Option<Vec<T>>) -> Result<Vec<T>> {
        let values = match (self.get::<Vec<T>>(key)?, default) {
            (Some(v), _) => v,
            (None, Some(d)) => d,
            (None, None) => return Err(self.fail(key, "required axis is missing")),
        };
        if values.is_empty() {
            return Err(self.fail(key, "axis list is empty"));
        }
        Ok(values)
    }

    /// An axis only some pair modes read: required when `used`, otherwise
    /// accepted but not expanded.
    fn mode_axis<T: DeserializeOwned>(&self, key: &str, used: bool) -> Result<Vec<T>> {
        if used {
            self.axis(key, None)
        } else {
            Ok(self.get::<Vec<T>>(key)?.unwrap_or_default())
        }
    }

    fn check_reals(&self, key: &str, values: &[f64], ok: impl Fn(f64) -> bool, what: &str) -> Result<()> {
        match values.iter().find(|v| !ok(**v)) {
            Some(v) => Err(self.fail(key, format!("{v} is not {what}"))),
            None => Ok(()),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// Parses and validates a config; `origin` only labels error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let map = match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => map,
            Ok(_) => {
                return Err(CliError::Parse {
                    path: origin.to_path_buf(),
                    line: 1,
                    msg: "config must be a JSON object".into(),
                })
            }
            Err(e) => {
                return Err(CliError::Parse {
                    path: origin.to_path_buf(),
                    line: e.line() as u64,
                    msg: e.to_string(),
                })
            }
        };
        let f = Fields { map, path: origin };
        if let Some(key) = f.map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(f.fail(key, "unknown key"));
        }

        let pair_mode: Vec<PairMode> = f.axis("pair_mode", Some(vec![PairMode::Bivariate]))?;
        let bivariate = pair_mode.contains(&PairMode::Bivariate);
        let identical = pair_mode.contains(&PairMode::IdenticalPairs);

        let tests = match f.get::<Vec<String>>("tests")? {
            None => vec![TestKind::T1, TestKind::T2, TestKind::T3, TestKind::Tnew1, TestKind::Tnew2],
            Some(names) if names.is_empty() => return Err(f.fail("tests", "list is empty")),
            Some(names) => names
                .iter()
                .map(|n| n.parse::<TestKind>().map_err(|e| f.fail("tests", e)))
                .collect::<Result<_>>()?,
        };

        let cfg = RunConfig {
            rho: f.mode_axis("rho", bivariate)?,
            n_a: f.axis("n_a", None)?,
            n_b: f.axis("n_b", None)?,
            n_c: f.axis("n_c", None)?,
            var1: f.mode_axis("var1", bivariate)?,
            var2: f.mode_axis("var2", bivariate)?,
            var_a: f.mode_axis("var_a", identical)?,
            var_b: f.mode_axis("var_b", identical)?,
            var_c: f.mode_axis("var_c", identical)?,
            mu1: f.axis("mu1", Some(vec![0.0]))?,
            mu2: f.axis("mu2", Some(vec![0.0]))?,
            hyp_diff: f.axis("hyp_diff", Some(vec![0.0]))?,
            pair_mode,
            tests,
            reps: f.get("reps")?.unwrap_or(DEFAULT_REPS),
            alpha: f.get("alpha")?.unwrap_or(DEFAULT_ALPHA),
            seed: f.get("seed")?.unwrap_or(DEFAULT_SEED),
            workers: f.get("workers")?,
            output_path: f.get("output_path")?,
            output_format: match f.get::<String>("output_format")?.as_deref() {
                None | Some("csv") => OutputFormat::Csv,
                Some("markdown") => OutputFormat::Markdown,
                Some(other) => {
                    return Err(f.fail("output_format", format!("`{other}` is not csv or markdown")))
                }
            },
        };

        f.check_reals("rho", &cfg.rho, |r| (-1.0..=1.0).contains(&r), "in [-1, 1]")?;
        for (key, values) in [
            ("var1", &cfg.var1),
            ("var2", &cfg.var2),
            ("var_a", &cfg.var_a),
            ("var_b", &cfg.var_b),
            ("var_c", &cfg.var_c),
        ] {
            f.check_reals(key, values, |v| v.is_finite() && v >= 0.0, "a finite variance")?;
        }
        for (key, values) in [("mu1", &cfg.mu1), ("mu2", &cfg.mu2), ("hyp_diff", &cfg.hyp_diff)] {
            f.check_reals(key, values, f64::is_finite, "finite")?;
        }
        if cfg.reps == 0 {
            return Err(f.fail("reps", "must be at least 1"));
        }
        if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
            return Err(f.fail("alpha", "must lie in (0, 1)"));
        }
        if cfg.workers == Some(0) {
            return Err(f.fail("workers", "must be at least 1"));
        }
        Ok(cfg)
    }

    /// The cross product of the design axes, in the documented order.
    pub fn grid(&self) -> Vec<DesignCell> {
        let mut cells = Vec::new();
        for &mode in &self.pair_mode {
            let mut block = match mode {
                PairMode::Bivariate => {
                    let mut g = vec![DesignCell::bivariate(0, 0, 0, 1.0, 1.0, 0.0)];
                    g = expand(g, &self.rho, |d, v| d.rho = v);
                    g = expand(g, &self.n_a, |d, v| d.n_a = v);
                    g = expand(g, &self.n_b, |d, v| d.n_b = v);
                    g = expand(g, &self.n_c, |d, v| d.n_c = v);
                    g = expand(g, &self.var1, |d, v| d.var1 = v);
                    expand(g, &self.var2, |d, v| d.var2 = v)
                }
                PairMode::IdenticalPairs => {
                    let mut g = vec![DesignCell::identical_pairs(0, 0, 0, 1.0, 1.0, 1.0)];
                    g = expand(g, &self.n_a, |d, v| d.n_a = v);
                    g = expand(g, &self.n_b, |d, v| d.n_b = v);
                    g = expand(g, &self.n_c, |d, v| d.n_c = v);
                    g = expand(g, &self.var_a, |d, v| {
                        d.var_a = Some(v);
                        d.var1 = v;
                    });
                    g = expand(g, &self.var_b, |d, v| {
                        d.var_b = Some(v);
                        d.var2 = v;
                    });
                    expand(g, &self.var_c, |d, v| d.var_c = Some(v))
                }
            };
            block = expand(block, &self.mu1, |d, v| d.mu1 = v);
            block = expand(block, &self.mu2, |d, v| d.mu2 = v);
            block = expand(block, &self.hyp_diff, |d, v| d.hyp_diff = v);
            cells.extend(block);
        }
        cells
    }
}

fn expand<T: Copy>(cells: Vec<DesignCell>, values: &[T], set: impl Fn(&mut DesignCell, T)) -> Vec<DesignCell> {
    let mut out = Vec::with_capacity(cells.len() * values.len());
    for cell in cells {
        for &v in values {
            let mut c = cell.clone();
            set(&mut c, v);
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_json(text, Path::new("cfg.json"))
    }

    fn key_of(e: CliError) -> String {
        match e {
            CliError::Config { key, .. } => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse(r#"{"rho":[0.5],"n_a":[5],"n_b":[10],"n_c":[5],"var1":[1],"var2":[4]}"#).unwrap();
        assert_eq!(c.reps, DEFAULT_REPS);
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.tests.len(), 5);
        let g = c.grid();
        assert_eq!(g, vec![DesignCell::bivariate(5, 10, 5, 1.0, 4.0, 0.5)]);
    }

    #[test]
    fn grid_is_cross_product_with_first_axis_slowest() {
        let c = parse(
            r#"{"rho":[0,0.5],"n_a":[5,10,30],"n_b":[5],"n_c":[5,10],"var1":[1],"var2":[1,2],
                "hyp_diff":[0,10]}"#,
        )
        .unwrap();
        let g = c.grid();
        assert_eq!(g.len(), 2 * 3 * 2 * 2 * 2);
        assert_eq!(g[0].rho, 0.0);
        assert_eq!(g[g.len() / 2].rho, 0.5);
        assert_eq!((g[0].hyp_diff, g[1].hyp_diff), (0.0, 10.0));
    }

    #[test]
    fn identical_pairs_axes() {
        let c = parse(
            r#"{"pair_mode":["identical_pairs"],"n_a":[5],"n_b":[5,30],"n_c":[5],
                "var_a":[1],"var_b":[1,4],"var_c":[1],"tests":["tnew1","anova"]}"#,
        )
        .unwrap();
        assert_eq!(c.tests, vec![TestKind::Tnew1, TestKind::Anova]);
        let g = c.grid();
        assert_eq!(g.len(), 4);
        assert_eq!(g[3], DesignCell::identical_pairs(5, 30, 5, 1.0, 4.0, 1.0));
    }

    #[test]
    fn errors_name_the_offending_key() {
        let base = r#""n_a":[5],"n_b":[5],"n_c":[5],"var1":[1],"var2":[1]"#;
        let cases = [
            (format!(r#"{{{base},"rho":[0],"colour":1}}"#), "colour"),
            (format!(r#"{{{base}}}"#), "rho"),
            (format!(r#"{{{base},"rho":[]}}"#), "rho"),
            (format!(r#"{{{base},"rho":[1.5]}}"#), "rho"),
            (format!(r#"{{{base},"rho":[0],"reps":0}}"#), "reps"),
            (format!(r#"{{{base},"rho":[0],"alpha":1}}"#), "alpha"),
            (format!(r#"{{{base},"rho":[0],"tests":["T9"]}}"#), "tests"),
            (format!(r#"{{{base},"rho":["x"]}}"#), "rho"),
            (format!(r#"{{{base},"rho":[0],"output_format":"xml"}}"#), "output_format"),
            (r#"{"rho":[0],"n_a":[5],"n_b":[5],"n_c":[5],"var1":[1],"var2":[-1]}"#.to_string(), "var2"),
        ];
        for (text, key) in cases {
            assert_eq!(key_of(parse(&text).unwrap_err()), key, "{text}");
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let e = parse("{\n\"rho\": [0,\n").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(matches!(e, CliError::Parse { .. }));
    }
}

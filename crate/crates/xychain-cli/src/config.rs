//! Flat key=value config files and grid/list parsing.
//!
//! Files hold one `key = value` pair per line, `#` starts a comment. Keys
//! match the long flag names with `-` or `_` interchangeable. Lists are
//! comma separated, grids are `start:stop:step`.

use std::collections::HashMap;
use std::str::FromStr;

use xychain::Grid;

use crate::{CliError, CliResult};

pub struct FileConfig {
    values: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig {
            values: HashMap::new(),
        }
    }

    pub fn load(path: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {path}: {e}")))?;
        let mut values = HashMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "{path}:{}: expected key = value, got {raw:?}",
                    line_no + 1
                )));
            };
            values.insert(normalize(key), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// Typed lookup; absent keys are `Ok(None)`.
    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Validation(format!("config key {key}: cannot parse {raw:?}"))
            }),
        }
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.values.get(&normalize(key)).cloned()
    }
}

/// Comma-separated list of values.
pub fn parse_list<T: FromStr>(raw: &str, what: &str) -> CliResult<Vec<T>> {
    let items: Result<Vec<T>, _> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<T>)
        .collect();
    let items =
        items.map_err(|_| CliError::Validation(format!("{what}: cannot parse list {raw:?}")))?;
    if items.is_empty() {
        return Err(CliError::Validation(format!("{what}: empty list")));
    }
    Ok(items)
}

/// Grid spec `start:stop:step`.
pub fn parse_grid(raw: &str, what: &str) -> CliResult<Grid> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Validation(format!(
            "{what}: expected start:stop:step, got {raw:?}"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums =
        nums.map_err(|_| CliError::Validation(format!("{what}: cannot parse grid {raw:?}")))?;
    Grid::new(nums[0], nums[1], nums[2])
        .map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

/// Grid values, refusing empty grids.
pub fn grid_values(raw: &str, what: &str) -> CliResult<Vec<f64>> {
    let values = parse_grid(raw, what)?.values();
    if values.is_empty() {
        return Err(CliError::Validation(format!("{what}: grid {raw:?} is empty")));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let dir = std::env::temp_dir().join("xychain-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("demo.conf");
        std::fs::write(&path, "# demo\nn = 20\nlambda2 = 0.2, 0.3 # two curves\nlambda1=0.005:1.0:0.005\n").unwrap();
        let cfg = FileConfig::load(path.to_str().unwrap()).unwrap();
        assert_eq!(cfg.get::<usize>("n").unwrap(), Some(20));
        assert_eq!(cfg.get_string("lambda2").unwrap(), "0.2, 0.3");
        assert!(cfg.get::<usize>("absent").unwrap().is_none());
    }

    #[test]
    fn rejects_malformed_lines() {
        let dir = std::env::temp_dir().join("xychain-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        std::fs::write(&path, "this is not a pair\n").unwrap();
        assert!(FileConfig::load(path.to_str().unwrap()).is_err());
    }

    #[test]
    fn grid_and_list_parsing() {
        let g = parse_grid("0.1:0.5:0.1", "lambda1").unwrap();
        assert_eq!(g.values().len(), 5);
        assert!(parse_grid("1:2", "lambda1").is_err());
        assert_eq!(parse_list::<usize>("10, 20,30", "n").unwrap(), vec![10, 20, 30]);
        assert!(parse_list::<usize>(" , ", "n").is_err());
    }
}

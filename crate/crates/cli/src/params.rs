//! Free-form `--name value` parameters for generator and function kinds.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::output::Failure;

pub struct Params {
    map: BTreeMap<String, String>,
}

/// Parses `--name value` and `--name=value` pairs. Dashes in names become
/// underscores.
pub fn split_params(args: &[String]) -> Result<Params, Failure> {
    let mut map = BTreeMap::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(Failure::invalid(format!("expected --<param>, found '{arg}'")));
        };
        let (name, value) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| Failure::invalid(format!("--{flag} needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        let name = name.replace('-', "_");
        if map.insert(name.clone(), value).is_some() {
            return Err(Failure::invalid(format!("--{name} given twice")));
        }
    }
    Ok(Params { map })
}

impl Params {
    pub fn take_raw(&mut self, name: &str) -> Option<String> {
        self.map.remove(name)
    }

    pub fn take_path(&mut self, name: &str) -> Option<PathBuf> {
        self.take_raw(name).map(PathBuf::from)
    }

    pub fn take_u64(&mut self, name: &str) -> Result<Option<u64>, Failure> {
        self.take_raw(name)
            .map(|v| v.parse().map_err(|_| Failure::invalid(format!("--{name}: '{v}' is not a non-negative integer"))))
            .transpose()
    }

    pub fn take_f64(&mut self, name: &str) -> Result<Option<f64>, Failure> {
        self.take_raw(name)
            .map(|v| v.parse().map_err(|_| Failure::invalid(format!("--{name}: '{v}' is not a number"))))
            .transpose()
    }

    /// Every remaining parameter, parsed as a number.
    pub fn numeric(&self) -> Result<BTreeMap<String, f64>, Failure> {
        self.map
            .iter()
            .map(|(k, v)| {
                v.parse::<f64>()
                    .map(|x| (k.clone(), x))
                    .map_err(|_| Failure::invalid(format!("--{k}: '{v}' is not a number")))
            })
            .collect()
    }
}

/// `4..12` (inclusive), `4..=12`, `4,6,8` or a single depth.
pub fn parse_depths(s: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::invalid(format!("--depths: cannot read '{s}'"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let depths: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if depths.is_empty() {
        return Err(bad());
    }
    Ok(depths)
}

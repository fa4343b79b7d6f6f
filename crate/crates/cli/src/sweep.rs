//! `--sweep path=lo:hi:n`: one run per value, in parallel, each into its own
//! subdirectory.

use std::path::Path;

use rayon::prelude::*;

use crate::commands;
use crate::manifest::{self, csv_bytes, num, Experiment, SpecError, Status};
use crate::Command;

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub path: String,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn parse(s: &str) -> Result<Self, String> {
        let bad = || format!("sweep `{s}` is not path=lo:hi:n");
        let (path, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 || path.trim().is_empty() {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        let values = if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        };
        Ok(Self { path: path.trim().to_string(), values })
    }
}

/// Set the numeric field at a dotted path, e.g. `f.params.p`.
pub fn set_path(spec: &mut serde_json::Value, path: &str, value: f64) -> Result<(), SpecError> {
    let mut cur = spec;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| SpecError(format!("sweep path `{path}`: `{key}` is not inside an object")))?;
        if i + 1 == keys.len() {
            match obj.get(*key) {
                Some(v) if v.is_number() => {}
                _ => return Err(SpecError(format!("sweep path `{path}` does not name a numeric field"))),
            }
            obj.insert(key.to_string(), serde_json::json!(value));
            return Ok(());
        }
        cur = obj.get_mut(*key).ok_or_else(|| SpecError(format!("sweep path `{path}`: no field `{key}`")))?;
    }
    unreachable!("split yields at least one key")
}

pub fn run_sweep(command: Command, base: &Experiment, sw: &Sweep, out: &Path, spec_path: Option<&str>) -> anyhow::Result<Status> {
    let experiments: Vec<Experiment> = sw
        .values
        .iter()
        .map(|&v| {
            let mut e = base.clone();
            set_path(&mut e.spec, &sw.path, v)?;
            e.sweep_point = Some((sw.path.clone(), v));
            Ok(e)
        })
        .collect::<Result<_, SpecError>>()?;
    let results: Vec<_> = experiments.par_iter().map(|e| commands::execute(command, e)).collect();
    let mut rows = Vec::new();
    let mut worst = Status::Success;
    let mut first_err = None;
    for (k, (exp, res)) in experiments.iter().zip(results).enumerate() {
        let dir = out.join(format!("sweep-{k:03}"));
        let (status, note) = match res {
            Ok(outcome) => {
                manifest::write_run(&dir, exp, spec_path, &outcome)?;
                (format!("{:?}", outcome.status).to_lowercase(), {
                    worst = worst.max(outcome.status);
                    String::new()
                })
            }
            Err(e) => {
                let s = format!("{e:#}");
                first_err.get_or_insert(e);
                ("error".to_string(), s)
            }
        };
        rows.push(vec![k.to_string(), num(sw.values[k]), status, exp.hash(), note]);
    }
    std::fs::create_dir_all(out).map_err(|e| SpecError(format!("output directory {} is not writable: {e}", out.display())))?;
    std::fs::write(out.join("sweep.csv"), csv_bytes(&["index", "value", "status", "manifest_hash", "error"], rows)?)?;
    match first_err {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_set() {
        let s = Sweep::parse("f.params.p=2:3:3").unwrap();
        assert_eq!(s.values, vec![2.0, 2.5, 3.0]);
        let mut v = serde_json::json!({"f": {"kind": "Power", "params": {"p": 2.0}}});
        set_path(&mut v, &s.path, 2.5).unwrap();
        assert_eq!(v["f"]["params"]["p"], 2.5);
        assert!(set_path(&mut v, "f.kind", 1.0).is_err());
        assert!(Sweep::parse("p=1:2").is_err());
    }
}

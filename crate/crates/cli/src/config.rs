//! Flat `key = value` config files for `simulate`.

use std::collections::BTreeMap;

use sparse_polar::sim::{parse_sweep, DecoderKind, SimConfig};

/// Keys accepted in a config file; each mirrors the flag of the same name.
pub const KEYS: [&str; 10] = [
    "decoder",
    "N",
    "k",
    "design-snr",
    "ebn0",
    "max-iters",
    "max-frames",
    "min-frame-errors",
    "seed",
    "workers",
];

/// Parses the file into key/value pairs. `#` starts a comment; underscores in
/// keys are read as dashes.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, Vec<String>> {
    let mut out = BTreeMap::new();
    let mut problems = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            problems.push(format!("line {}: expected `key = value`", i + 1));
            continue;
        };
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            problems.push(format!("line {}: unknown key `{key}`", i + 1));
            continue;
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            problems.push(format!("line {}: `{key}` given twice", i + 1));
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(problems)
    }
}

/// Builds a config from merged key/value pairs, collecting every problem
/// instead of stopping at the first.
pub fn build(kv: &BTreeMap<String, String>) -> Result<SimConfig, Vec<String>> {
    let mut problems = Vec::new();
    let mut num = |key: &str| -> Option<u64> {
        let v = kv.get(key)?;
        match v.parse::<u64>() {
            Ok(x) => Some(x),
            Err(_) => {
                problems.push(format!("{key}: `{v}` is not a non-negative integer"));
                None
            }
        }
    };
    let block_len = num("N");
    let k = num("k");
    let max_iters = num("max-iters");
    let max_frames = num("max-frames");
    let min_frame_errors = num("min-frame-errors");
    let seed = num("seed");
    let workers = num("workers");

    let decoder = match kv.get("decoder").map(|d| d.parse::<DecoderKind>()) {
        None => {
            problems.push("decoder is required".into());
            None
        }
        Some(Err(e)) => {
            problems.push(e.to_string());
            None
        }
        Some(Ok(d)) => Some(d),
    };
    let design_snr = match kv.get("design-snr").map(|v| v.parse::<f64>()) {
        Some(Err(_)) => {
            problems.push(format!("design-snr: `{}` is not a number", kv["design-snr"]));
            None
        }
        other => other.map(Result::unwrap),
    };
    let ebn0 = match kv.get("ebn0").map(|v| parse_sweep(v)) {
        None => {
            problems.push("ebn0 is required".into());
            None
        }
        Some(Err(e)) => {
            problems.push(e.to_string());
            None
        }
        Some(Ok(v)) => Some(v),
    };
    if block_len.is_none() && !kv.contains_key("N") {
        problems.push("N is required".into());
    }
    if k.is_none() && !kv.contains_key("k") {
        problems.push("k is required".into());
    }
    let (Some(decoder), Some(ebn0), Some(block_len), Some(k)) = (decoder, ebn0, block_len, k) else {
        return Err(problems);
    };

    let mut c = SimConfig::new(block_len as usize, k as usize, decoder, ebn0);
    if let Some(x) = design_snr {
        c.design_snr_db = x;
    }
    if let Some(x) = max_iters {
        c.max_iters = x as usize;
    }
    if let Some(x) = max_frames {
        c.max_frames = x;
    }
    if let Some(x) = min_frame_errors {
        c.min_frame_errors = x;
    }
    if let Some(x) = seed {
        c.seed = x;
    }
    if let Some(x) = workers {
        c.workers = x as usize;
    }
    problems.extend(c.problems());
    if problems.is_empty() {
        Ok(c)
    } else {
        Err(problems)
    }
}

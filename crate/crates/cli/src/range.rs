//! Particle-number lists: `20`, `2..100`, `10..100:10` and comma lists of these.

use std::collections::BTreeSet;

pub fn parse_n_list(spec: &str) -> Result<Vec<u32>, String> {
    let mut out = BTreeSet::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            Some((lo, rest)) => {
                let (hi, step) = match rest.split_once(':') {
                    Some((hi, step)) => (hi, step),
                    None => (rest, "1"),
                };
                let lo = parse_n(lo)?;
                let hi = parse_n(hi)?;
                let step = parse_n(step)?;
                if lo > hi {
                    return Err(format!("empty range '{item}'"));
                }
                out.extend((lo..=hi).step_by(step as usize));
            }
            None => {
                out.insert(parse_n(item)?);
            }
        }
    }
    if out.is_empty() {
        return Err(format!("no particle numbers in '{spec}'"));
    }
    Ok(out.into_iter().collect())
}

fn parse_n(s: &str) -> Result<u32, String> {
    match s.trim().parse::<u32>() {
        Ok(0) | Err(_) => Err(format!("'{s}' is not a positive integer")),
        Ok(n) => Ok(n),
    }
}

/// `start:stop:count` for a uniform nu grid.
pub fn parse_sweep(spec: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("sweep must look like start:stop:count, got '{spec}'"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad sweep start '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad sweep stop '{hi}'"))?;
    let count: usize = count.trim().parse().map_err(|_| format!("bad sample count '{count}'"))?;
    Ok((lo, hi, count))
}

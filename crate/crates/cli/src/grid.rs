//! Grid specifications: `start:stop:count` (inclusive, evenly spaced) or a
//! comma-separated list of values.

use anyhow::{bail, Context, Result};

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        bail!("empty grid");
    }
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            bail!("grid {text:?}: expected start:stop:count");
        };
        let start: f64 = start
            .trim()
            .parse()
            .with_context(|| format!("grid {text:?}: bad start"))?;
        let stop: f64 = stop
            .trim()
            .parse()
            .with_context(|| format!("grid {text:?}: bad stop"))?;
        let count: usize = count
            .trim()
            .parse()
            .with_context(|| format!("grid {text:?}: bad count"))?;
        if count < 2 {
            bail!("grid {text:?}: need at least 2 points");
        }
        (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect()
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("grid {text:?}: bad value {s:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    if values.len() < 2 {
        bail!("grid {text:?}: need at least 2 points");
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        bail!("grid {text:?}: non-finite value {v}");
    }
    Ok(values)
}

//! Experiment drivers and bound tables behind the `upqp` binary.

pub mod bounds;
pub mod experiments;
pub mod format;
pub mod spec;

use anyhow::{bail, Context, Result};

/// Parses `a`, `a:b` (inclusive, step 1) or `a,b,c`.
pub fn parse_usize_range(s: &str) -> Result<Vec<usize>> {
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .with_context(|| format!("bad integer {x:?}"))
    };
    if let Some((a, b)) = s.split_once(':') {
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            bail!("empty range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(parse).collect()
}

/// Parses `a`, `a,b,c` or `start:end:step` (inclusive of `end` up to rounding).
pub fn parse_f64_range(s: &str) -> Result<Vec<f64>> {
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number {x:?}"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
            if step.is_nan() || step <= 0.0 || b < a {
                bail!("bad range {s}");
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            // snap to 12 significant digits: 0.1:0.9:0.1 gives 0.3, not 0.30000000000000004
            Ok((0..=n)
                .map(|k| format::fmt_num(a + k as f64 * step).parse().unwrap())
                .collect())
        }
        [single] => single.split(',').map(parse).collect(),
        _ => bail!("expected a, a,b,c or start:end:step, got {s}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_usize_range("2:6").unwrap(), vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_usize_range("3,9").unwrap(), vec![3, 9]);
        let e = parse_f64_range("0.1:0.9:0.1").unwrap();
        assert_eq!(e.len(), 9);
        assert_eq!(e[2], 0.3);
        assert_eq!(e[8], 0.9);
        assert_eq!(parse_f64_range("0.5").unwrap(), vec![0.5]);
        assert!(parse_f64_range("1:0:0.1").is_err());
        assert!(parse_usize_range("x").is_err());
    }
}

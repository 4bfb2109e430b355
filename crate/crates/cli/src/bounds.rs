//! Closed-form memory bounds, evaluated in log₂ space.

use serde::{Deserialize, Serialize};
use upqp_core::banach::{memory_lower_bound_formula, ProcessorKind};

use crate::format::{fmt_bool, fmt_num, fmt_opt, Table};

/// Largest `log₂` value printed in linear space.
const MAX_LINEAR_LOG2: f64 = 1023.0;

/// Constants left symbolic by the bound formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub k_perez: f64,
    pub k_majenz: f64,
    /// `C` in `T₂(B(H_m)) ≤ (C log₂ m)^{1/2}`.
    pub c: f64,
    /// `C̃` in the covering estimate `(C̃/ε)^{d²}`.
    pub c_tilde: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            k_perez: 1.0,
            k_majenz: 1.0,
            c: 4.0,
            c_tilde: 9.0,
        }
    }
}

/// Constants whose defaults are conventions of this tool, not values
/// derived anywhere.
pub const CONVENTIONAL_DEFAULTS: [&str; 3] = ["k_perez", "k_majenz", "c_tilde"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantsRecord {
    #[serde(flatten)]
    pub constants: Constants,
    pub conventional_defaults: Vec<String>,
}

impl From<Constants> for ConstantsRecord {
    fn from(constants: Constants) -> Self {
        Self {
            constants,
            conventional_defaults: CONVENTIONAL_DEFAULTS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// `2^{log2}` with clamping and overflow bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    /// `None` when the value overflows `f64`.
    pub value: Option<f64>,
    pub log2: f64,
    /// Lower bound below 1 raised to the trivial value 1.
    pub clamped: bool,
}

impl BoundValue {
    fn lower(log2: f64) -> Self {
        if log2 < 0.0 {
            return Self {
                value: Some(1.0),
                log2: 0.0,
                clamped: true,
            };
        }
        Self::upper(log2)
    }

    fn upper(log2: f64) -> Self {
        Self {
            value: (log2 <= MAX_LINEAR_LOG2).then(|| log2.exp2()),
            log2,
            clamped: false,
        }
    }

    pub fn overflow(&self) -> bool {
        self.value.is_none()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsRow {
    pub d: usize,
    pub epsilon: f64,
    pub lb_perez: BoundValue,
    pub lb_majenz: BoundValue,
    /// General processors.
    pub lb_thm3: BoundValue,
    /// Unitary processors.
    pub lb_thm3_unitary: BoundValue,
    pub ub_pbt: BoundValue,
    pub ub_net: BoundValue,
}

/// `K (1/d)^{(d+1)/2} (1/ε)^{(d−1)/2}`.
pub fn lb_perez_log2(d: usize, eps: f64, k: f64) -> f64 {
    let d = d as f64;
    k.log2() - 0.5 * (d + 1.0) * d.log2() - 0.5 * (d - 1.0) * eps.log2()
}

/// `K (d/ε)²`.
pub fn lb_majenz_log2(d: usize, eps: f64, k: f64) -> f64 {
    k.log2() + 2.0 * ((d as f64).log2() - eps.log2())
}

pub fn lb_thm3_log2(d: usize, eps: f64, c: f64, kind: ProcessorKind) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let d = d as f64;
    match kind {
        ProcessorKind::Unitary => (1.0 - eps) * d / c,
        ProcessorKind::Kraus => (1.0 - eps) * d / (3.0 * c) - (2.0 / 3.0) * d.log2(),
    }
}

/// Port-based teleportation, `2^{4 d² log₂ d / ε²}`.
pub fn ub_pbt_log2(d: usize, eps: f64) -> f64 {
    let d = d as f64;
    4.0 * d * d * d.log2() / (eps * eps)
}

/// Net construction, `(C̃/ε)^{d²}`.
pub fn ub_net_log2(d: usize, eps: f64, c_tilde: f64) -> f64 {
    (d * d) as f64 * (c_tilde.log2() - eps.log2())
}

pub fn bounds_row(d: usize, eps: f64, k: &Constants) -> BoundsRow {
    BoundsRow {
        d,
        epsilon: eps,
        lb_perez: BoundValue::lower(lb_perez_log2(d, eps, k.k_perez)),
        lb_majenz: BoundValue::lower(lb_majenz_log2(d, eps, k.k_majenz)),
        lb_thm3: BoundValue::lower(lb_thm3_log2(d, eps, k.c, ProcessorKind::Kraus)),
        lb_thm3_unitary: BoundValue::lower(lb_thm3_log2(d, eps, k.c, ProcessorKind::Unitary)),
        ub_pbt: BoundValue::upper(ub_pbt_log2(d, eps)),
        ub_net: BoundValue::upper(ub_net_log2(d, eps, k.c_tilde)),
    }
}

/// Every formula at every `(d, ε)`; `ε` must lie in `[0, 1)` and `d ≥ 2`.
pub fn bounds_table(ds: &[usize], eps: &[f64], k: &Constants) -> anyhow::Result<Vec<BoundsRow>> {
    anyhow::ensure!(
        !ds.is_empty() && !eps.is_empty(),
        "bounds need nonempty d and epsilon ranges"
    );
    anyhow::ensure!(ds.iter().all(|&d| d >= 2), "bounds need d >= 2");
    anyhow::ensure!(
        eps.iter().all(|&e| (0.0..1.0).contains(&e)),
        "bounds need epsilon in [0, 1)"
    );
    Ok(ds
        .iter()
        .flat_map(|&d| eps.iter().map(move |&e| bounds_row(d, e, k)))
        .collect())
}

const BOUND_COLUMNS: [&str; 6] = [
    "lb_perez",
    "lb_majenz",
    "lb_thm3",
    "lb_thm3_unitary",
    "ub_pbt",
    "ub_net",
];

pub fn bounds_csv(rows: &[BoundsRow], k: &Constants) -> Table {
    let mut header = vec!["d".to_string(), "epsilon".to_string()];
    for c in BOUND_COLUMNS {
        header.push(c.to_string());
        header.push(format!("log2_{c}"));
    }
    header.extend(
        [
            "flags",
            "k_perez",
            "k_majenz",
            "c",
            "c_tilde",
            "conventional_defaults",
        ]
        .map(String::from),
    );
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for r in rows {
        let vals = [
            r.lb_perez,
            r.lb_majenz,
            r.lb_thm3,
            r.lb_thm3_unitary,
            r.ub_pbt,
            r.ub_net,
        ];
        let mut row = vec![r.d.to_string(), fmt_num(r.epsilon)];
        let mut flags = Vec::new();
        for (name, v) in BOUND_COLUMNS.iter().zip(vals) {
            row.push(fmt_opt(v.value));
            row.push(fmt_num(v.log2));
            if v.clamped {
                flags.push(format!("{name}:clamped"));
            }
            if v.overflow() {
                flags.push(format!("{name}:overflow"));
            }
        }
        row.push(flags.join(";"));
        row.extend([k.k_perez, k.k_majenz, k.c, k.c_tilde].map(fmt_num));
        row.push(CONVENTIONAL_DEFAULTS.join(";"));
        t.rows.push(row);
    }
    t
}

/// Accuracy floor for memories `m ≤ k d^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFloor {
    pub d: usize,
    pub c_prime: f64,
    pub floor: f64,
    pub clamped: bool,
}

/// `C′ = 3C(s + log₂ k + 2/3)`, expanded so integer inputs stay exact.
pub fn corollary_constant(k: f64, s: f64, c: f64) -> f64 {
    3.0 * c * (s + k.log2()) + 2.0 * c
}

/// `1 − C′ log₂ d / d`, clamped at 0.
pub fn corollary_epsilon_floor(d: usize, k: f64, s: f64, c: f64) -> anyhow::Result<EpsilonFloor> {
    anyhow::ensure!(
        d >= 2 && k >= 1.0 && s >= 0.0,
        "corollary needs d >= 2, k >= 1, s >= 0"
    );
    let c_prime = corollary_constant(k, s, c);
    let raw = 1.0 - c_prime * (d as f64).log2() / d as f64;
    Ok(EpsilonFloor {
        d,
        c_prime,
        floor: raw.max(0.0),
        clamped: raw < 0.0,
    })
}

pub fn corollary_csv(rows: &[EpsilonFloor], k: f64, s: f64, c: f64) -> Table {
    let mut t = Table::new(&["d", "k", "s", "c", "c_prime", "epsilon_floor", "clamped"]);
    for r in rows {
        t.push(vec![
            r.d.to_string(),
            fmt_num(k),
            fmt_num(s),
            fmt_num(c),
            fmt_num(r.c_prime),
            fmt_num(r.floor),
            fmt_bool(r.clamped),
        ]);
    }
    t
}

/// Cross-check used by tests: `memory_lower_bound_formula` and the table
/// share one formula.
pub fn lb_thm3_matches_core(d: usize, eps: f64, c: f64) -> bool {
    let core = memory_lower_bound_formula(d, eps, c, ProcessorKind::Unitary).map(|b| b.log2_m);
    core.map(|l| l == lb_thm3_log2(d, eps, c, ProcessorKind::Unitary).max(0.0))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majenz_example() {
        let r = bounds_row(2, 0.5, &Constants::default());
        assert_eq!(r.lb_majenz.value, Some(16.0));
        assert_eq!(r.lb_majenz.log2, 4.0);
    }

    #[test]
    fn unitary_lower_bound_example() {
        let r = bounds_row(100, 0.0, &Constants::default());
        assert_eq!(r.lb_thm3_unitary.log2, 25.0);
        assert_eq!(r.lb_thm3_unitary.value, Some(33_554_432.0));
        assert!(lb_thm3_matches_core(100, 0.0, 4.0));
        assert!(r.lb_majenz.overflow() && r.lb_majenz.log2.is_infinite());
    }

    #[test]
    fn near_one_epsilon_clamps() {
        let r = bounds_row(16, 0.999, &Constants::default());
        assert!(r.lb_thm3.clamped);
        assert_eq!(r.lb_thm3.value, Some(1.0));
    }

    #[test]
    fn large_d_overflows_to_log_space() {
        let r = bounds_row(64, 0.1, &Constants::default());
        assert!(r.ub_pbt.overflow());
        assert!(r.ub_pbt.log2.is_finite());
        let t = bounds_csv(&[r], &Constants::default());
        assert!(t.column("flags").unwrap()[0].contains("ub_pbt:overflow"));
    }

    #[test]
    fn log_and_linear_agree() {
        let rows = bounds_table(
            &[2, 3, 4, 5, 6],
            &[0.1, 0.3, 0.5, 0.7, 0.9],
            &Constants::default(),
        )
        .unwrap();
        for r in rows {
            for v in [
                r.lb_perez,
                r.lb_majenz,
                r.lb_thm3,
                r.lb_thm3_unitary,
                r.ub_pbt,
                r.ub_net,
            ] {
                if let Some(x) = v.value {
                    assert!((x.log2() - v.log2).abs() <= 1e-9 * v.log2.abs().max(1.0));
                    assert!(x.is_finite() && x > 0.0);
                }
            }
        }
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary_constant(1.0, 2.0, 4.0), 32.0);
        let f = corollary_epsilon_floor(1024, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(f.floor, 0.6875);
        let small = corollary_epsilon_floor(4, 1.0, 2.0, 4.0).unwrap();
        assert!(small.clamped && small.floor == 0.0);
        let huge = corollary_epsilon_floor(1 << 40, 1.0, 0.0, 4.0).unwrap();
        assert!(huge.floor > 1.0 - 1e-9);
    }

    #[test]
    fn rejects_bad_ranges() {
        let k = Constants::default();
        assert!(bounds_table(&[], &[0.5], &k).is_err());
        assert!(bounds_table(&[1], &[0.5], &k).is_err());
        assert!(bounds_table(&[2], &[1.0], &k).is_err());
    }
}

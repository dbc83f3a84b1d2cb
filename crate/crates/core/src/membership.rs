//! Fuzzy membership functions: evaluation, analytic parameter gradients,
//! and grid initialization.
//!
//! Three families are supported. Triangular and trapezoidal are the standard
//! piecewise-linear forms; the generalized bell is
//!
//! ```text
//! mu(x) = 1 / (1 + |(x - c) / a|^(2b))
//! ```
//!
//! with width `a > 0`, slope `b > 0`, and center `c`. All evaluations return
//! a degree in `[0, 1]`. Parameter invariants are enforced at construction
//! and re-established after every training step (see [`MembershipFunction::step_params`]).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Smallest admissible value for the generalized bell's `a` and `b`
/// parameters; `mu` divides by `a` and the exponent `2b` must stay positive.
const GBELL_PARAM_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MfKind {
    Triangular,
    Trapezoidal,
    GBell,
}

impl MfKind {
    pub const ALL: [MfKind; 3] = [MfKind::Triangular, MfKind::Trapezoidal, MfKind::GBell];

    pub fn param_count(self) -> usize {
        match self {
            MfKind::Triangular => 3,
            MfKind::Trapezoidal => 4,
            MfKind::GBell => 3,
        }
    }
}

impl fmt::Display for MfKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MfKind::Triangular => write!(f, "triangular"),
            MfKind::Trapezoidal => write!(f, "trapezoidal"),
            MfKind::GBell => write!(f, "gbell"),
        }
    }
}

impl FromStr for MfKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triangular" | "tri" => Ok(MfKind::Triangular),
            "trapezoidal" | "trap" => Ok(MfKind::Trapezoidal),
            "gbell" | "bell" => Ok(MfKind::GBell),
            other => Err(Error::InvalidConfig(format!(
                "unknown membership function kind `{other}` (expected triangular, trapezoidal, or gbell)"
            ))),
        }
    }
}

/// One fuzzy set. Parameters are validated on construction:
/// triangular `(l, m, r)` needs `l <= m <= r`, trapezoidal `(a, b, c, d)`
/// needs `a <= b <= c <= d`, and gbell `(a, b, c)` needs `a > 0`, `b > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipFunction {
    kind: MfKind,
    params: Vec<f64>,
}

impl MembershipFunction {
    pub fn new(kind: MfKind, params: Vec<f64>) -> Result<Self> {
        let mf = Self { kind, params };
        mf.validate()?;
        Ok(mf)
    }

    pub fn triangular(l: f64, m: f64, r: f64) -> Result<Self> {
        Self::new(MfKind::Triangular, vec![l, m, r])
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(MfKind::Trapezoidal, vec![a, b, c, d])
    }

    pub fn gbell(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(MfKind::GBell, vec![a, b, c])
    }

    pub fn kind(&self) -> MfKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.len() != self.kind.param_count() {
            return Err(Error::InvalidMembership(format!(
                "{} takes {} parameters, got {}",
                self.kind,
                self.kind.param_count(),
                p.len()
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMembership(format!(
                "{} parameters must be finite, got {p:?}",
                self.kind
            )));
        }
        match self.kind {
            MfKind::Triangular => {
                if !(p[0] <= p[1] && p[1] <= p[2]) {
                    return Err(Error::InvalidMembership(format!(
                        "triangular needs l <= m <= r, got {p:?}"
                    )));
                }
            }
            MfKind::Trapezoidal => {
                if !(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3]) {
                    return Err(Error::InvalidMembership(format!(
                        "trapezoidal needs a <= b <= c <= d, got {p:?}"
                    )));
                }
            }
            MfKind::GBell => {
                if !(p[0] > 0.0 && p[1] > 0.0) {
                    return Err(Error::InvalidMembership(format!(
                        "gbell needs a > 0 and b > 0, got {p:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Membership degree at `x`, always in `[0, 1]`.
    ///
    /// `x` must be finite; this is asserted rather than silently producing
    /// NaN. Callers that accept external data validate before reaching here.
    pub fn eval(&self, x: f64) -> f64 {
        assert!(x.is_finite(), "membership evaluated at non-finite x");
        let p = &self.params;
        match self.kind {
            MfKind::Triangular => {
                let (l, m, r) = (p[0], p[1], p[2]);
                if x == m {
                    1.0
                } else if x <= l || x >= r {
                    0.0
                } else if x < m {
                    (x - l) / (m - l)
                } else {
                    (r - x) / (r - m)
                }
            }
            MfKind::Trapezoidal => {
                let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
                if (b..=c).contains(&x) {
                    1.0
                } else if x <= a || x >= d {
                    0.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            }
            MfKind::GBell => {
                let (a, b, c) = (p[0], p[1], p[2]);
                if x == c {
                    return 1.0;
                }
                let t = ((x - c).abs() / a).powf(2.0 * b);
                if t.is_infinite() {
                    0.0
                } else {
                    1.0 / (1.0 + t)
                }
            }
        }
    }

    /// Partial derivatives of [`eval`](Self::eval) with respect to each
    /// parameter, in parameter order.
    ///
    /// At the kinks of the piecewise-linear kinds (feet, apex, plateau
    /// shoulders) the subgradient 0 is returned, which keeps training
    /// updates bounded.
    pub fn grad_params(&self, x: f64) -> Vec<f64> {
        assert!(x.is_finite(), "membership gradient at non-finite x");
        let p = &self.params;
        match self.kind {
            MfKind::Triangular => {
                let (l, m, r) = (p[0], p[1], p[2]);
                if x <= l || x >= r || x == m {
                    vec![0.0; 3]
                } else if x < m {
                    let d = m - l;
                    vec![(x - m) / (d * d), -(x - l) / (d * d), 0.0]
                } else {
                    let d = r - m;
                    vec![0.0, (r - x) / (d * d), (x - m) / (d * d)]
                }
            }
            MfKind::Trapezoidal => {
                let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
                if x <= a || x >= d || (b..=c).contains(&x) {
                    vec![0.0; 4]
                } else if x < b {
                    let w = b - a;
                    vec![(x - b) / (w * w), -(x - a) / (w * w), 0.0, 0.0]
                } else {
                    let w = d - c;
                    vec![0.0, 0.0, (d - x) / (w * w), (x - c) / (w * w)]
                }
            }
            MfKind::GBell => {
                let (a, b, c) = (p[0], p[1], p[2]);
                if x == c {
                    // Symmetric peak: mu is stationary in every parameter.
                    return vec![0.0; 3];
                }
                let u = (x - c).abs() / a;
                let t = u.powf(2.0 * b);
                // g = mu^2 * t = t / (1 + t)^2, which tends to 0 as t -> 0 or inf.
                let g = if t.is_finite() {
                    let mu = 1.0 / (1.0 + t);
                    mu * mu * t
                } else {
                    0.0
                };
                let da = (2.0 * b / a) * g;
                let db = -2.0 * u.ln() * g;
                let dc = 2.0 * b * (x - c).signum() / (x - c).abs() * g;
                vec![da, db, dc]
            }
        }
    }

    /// In-place training update: add `deltas` to the parameters, then repair
    /// the invariants (sort triangular/trapezoidal parameters, clamp the
    /// gbell width and slope to a positive floor).
    pub fn step_params(&mut self, deltas: &[f64]) {
        assert_eq!(deltas.len(), self.params.len(), "step width mismatch");
        for (p, d) in self.params.iter_mut().zip(deltas) {
            *p += d;
        }
        match self.kind {
            MfKind::Triangular | MfKind::Trapezoidal => {
                self.params
                    .sort_by(|a, b| a.partial_cmp(b).expect("finite params"));
            }
            MfKind::GBell => {
                self.params[0] = self.params[0].max(GBELL_PARAM_FLOOR);
                self.params[1] = self.params[1].max(GBELL_PARAM_FLOOR);
            }
        }
    }

    /// Evenly spaced fuzzy partition of `[domain_min, domain_max]` with
    /// `count` sets, shaped so every point of the domain has maximum
    /// membership at least 0.5 across the set.
    pub fn init_grid(
        kind: MfKind,
        domain_min: f64,
        domain_max: f64,
        count: usize,
    ) -> Result<Vec<Self>> {
        if !(domain_min.is_finite() && domain_max.is_finite()) {
            return Err(Error::NonFinite("membership grid domain".into()));
        }
        if domain_max <= domain_min {
            return Err(Error::DegenerateDomain {
                min: domain_min,
                max: domain_max,
            });
        }
        if count < 2 {
            return Err(Error::InvalidConfig(format!(
                "membership grid needs at least 2 functions per input, got {count}"
            )));
        }
        let spacing = (domain_max - domain_min) / (count - 1) as f64;
        (0..count)
            .map(|k| {
                let center = domain_min + spacing * k as f64;
                match kind {
                    MfKind::Triangular => {
                        Self::triangular(center - spacing, center, center + spacing)
                    }
                    MfKind::Trapezoidal => Self::trapezoidal(
                        center - spacing,
                        center - spacing / 4.0,
                        center + spacing / 4.0,
                        center + spacing,
                    ),
                    MfKind::GBell => Self::gbell(spacing / 2.0, 2.0, center),
                }
            })
            .collect()
    }
}

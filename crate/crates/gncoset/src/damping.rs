//! Per-iteration damping factors for the LLR generator.

use std::path::Path;

use crate::error::{Error, Result};

/// Damping factors (alpha_t, beta_t, gamma_t) for iterations t = 1..t_max.
///
/// alpha_1, beta_1 and gamma_1 are structurally zero (iteration 1 has no
/// previous hard outputs), as is beta_2 (no t-2 output exists at t = 2).
#[derive(Debug, Clone, PartialEq)]
pub struct DampingSchedule {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl DampingSchedule {
    /// Builds a schedule from per-iteration factor vectors (index 0 is
    /// iteration 1). All entries must be finite and non-negative, and the
    /// structural zeros must hold.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.len() != gamma.len() {
            return Err(Error::InvalidSchedule(format!(
                "factor vectors differ in length: {}/{}/{}",
                alpha.len(),
                beta.len(),
                gamma.len()
            )));
        }
        if alpha.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty".into()));
        }
        let sched = Self { alpha, beta, gamma };
        sched.validate()?;
        Ok(sched)
    }

    /// Builds a schedule without the non-negativity check. Used by the
    /// trainer's no-clipping ablation; such schedules cannot be re-loaded
    /// from file.
    pub(crate) fn new_unclipped(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Self {
        Self { alpha, beta, gamma }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma)] {
            if let Some((i, &x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0)
            {
                return Err(Error::InvalidSchedule(format!(
                    "{name}[t={}] = {x} must be finite and >= 0",
                    i + 1
                )));
            }
        }
        if self.alpha[0] != 0.0 || self.beta[0] != 0.0 || self.gamma[0] != 0.0 {
            return Err(Error::InvalidSchedule(
                "alpha_1, beta_1, gamma_1 must be 0".into(),
            ));
        }
        if self.beta.len() >= 2 && self.beta[1] != 0.0 {
            return Err(Error::InvalidSchedule("beta_2 must be 0".into()));
        }
        Ok(())
    }

    /// Number of iterations the schedule covers.
    pub fn t_max(&self) -> usize {
        self.alpha.len()
    }

    /// alpha for iteration t (1-based).
    pub fn alpha(&self, t: usize) -> f64 {
        self.alpha[t - 1]
    }

    pub fn beta(&self, t: usize) -> f64 {
        self.beta[t - 1]
    }

    pub fn gamma(&self, t: usize) -> f64 {
        self.gamma[t - 1]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gamma
    }

    /// The shipped default: converged damping factors for t_max = 8.
    pub fn table2() -> Self {
        Self {
            alpha: vec![0.0, 0.2680, 0.4236, 0.5051, 0.6147, 1.2661, 0.4054, 0.5360],
            beta: vec![0.0, 0.0, 0.2075, 0.2542, 0.3574, 0.9922, 0.2714, 0.1566],
            gamma: vec![0.0, 1.9997, 0.6695, 0.8296, 0.7598, 0.7647, 0.7851, 0.8723],
        }
    }

    /// An all-zero schedule: every iteration decodes pure channel LLRs.
    pub fn zeros(t_max: usize) -> Result<Self> {
        if t_max == 0 {
            return Err(Error::InvalidSchedule("t_max must be >= 1".into()));
        }
        Ok(Self {
            alpha: vec![0.0; t_max],
            beta: vec![0.0; t_max],
            gamma: vec![0.0; t_max],
        })
    }

    /// Truncates to the first `t_max` iterations.
    pub fn truncated(&self, t_max: usize) -> Result<Self> {
        if t_max == 0 || t_max > self.t_max() {
            return Err(Error::InvalidSchedule(format!(
                "cannot truncate a {}-iteration schedule to {t_max}",
                self.t_max()
            )));
        }
        Ok(Self {
            alpha: self.alpha[..t_max].to_vec(),
            beta: self.beta[..t_max].to_vec(),
            gamma: self.gamma[..t_max].to_vec(),
        })
    }

    /// Parses the text format: optional `t,alpha,beta,gamma` header and `#`
    /// comments, then one `t,alpha,beta,gamma` line per iteration with t
    /// running 1..t_max.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut gamma = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("t,") {
                continue;
            }
            let fields: Vec<&str> = t.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no + 1,
                    msg: format!("expected `t,alpha,beta,gamma`, got `{t}`"),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Parse {
                    line: line_no + 1,
                    msg: format!("bad number `{s}`"),
                })
            };
            let t_idx: usize = fields[0].parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                msg: format!("bad iteration index `{}`", fields[0]),
            })?;
            if t_idx != alpha.len() + 1 {
                return Err(Error::Parse {
                    line: line_no + 1,
                    msg: format!("iteration {} out of order (expected {})", t_idx, alpha.len() + 1),
                });
            }
            alpha.push(parse(fields[1])?);
            beta.push(parse(fields[2])?);
            gamma.push(parse(fields[3])?);
        }
        Self::new(alpha, beta, gamma)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("t,alpha,beta,gamma\n");
        for t in 1..=self.t_max() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                t,
                self.alpha(t),
                self.beta(t),
                self.gamma(t)
            ));
        }
        out
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// v is 0, −1, −2, … exactly.
pub fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

fn check_denominators(what: &str, vals: impl IntoIterator<Item = f64>) -> Result<()> {
    for v in vals {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{what}: non-finite parameter {v}")));
        }
        if is_nonpositive_integer(v) {
            return Err(Error::Domain(format!("{what}: denominator parameter {v} is a nonpositive integer")));
        }
    }
    Ok(())
}

/// Parameters (b₁…bₙ, b′, a, c₁…cₙ, c′) of the F₂⁽ⁿ⁾ series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGParamsF2n {
    pub b: Vec<f64>,
    pub bprime: f64,
    pub a: f64,
    pub c: Vec<f64>,
    pub cprime: f64,
}

impl HGParamsF2n {
    pub fn new(b: Vec<f64>, bprime: f64, a: f64, c: Vec<f64>, cprime: f64) -> Result<Self> {
        let p = HGParamsF2n { b, bprime, a, c, cprime };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.is_empty() {
            return Err(Error::Domain("F2n needs n >= 1".into()));
        }
        if self.b.len() != self.c.len() {
            return Err(Error::Domain(format!("b has {} entries but c has {}", self.b.len(), self.c.len())));
        }
        check_denominators("F2n", self.c.iter().copied().chain([self.cprime]))
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }
}

/// Parameters of F_{n+1,m}: n numerator/denominator pairs on |i|, m variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGParamsFnm {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl HGParamsFnm {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let p = HGParamsFnm { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_empty() || self.beta.is_empty() {
            return Err(Error::Domain("Fnm needs n >= 1 and m >= 1".into()));
        }
        if self.alpha.len() != self.gamma.len() {
            return Err(Error::Domain("alpha and gamma lengths differ".into()));
        }
        check_denominators("Fnm", self.gamma.iter().copied())
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }
}

/// Parameters of F₂⁽ⁿ'ᵐ⁾. `b1row`/`c1row` attach to the first variable,
/// `b_rest`/`c_rest` to variables 2…m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HGParamsF2nm {
    pub b1row: Vec<f64>,
    pub b_rest: Vec<f64>,
    pub a: f64,
    pub c1row: Vec<f64>,
    pub c_rest: Vec<f64>,
}

impl HGParamsF2nm {
    pub fn new(b1row: Vec<f64>, b_rest: Vec<f64>, a: f64, c1row: Vec<f64>, c_rest: Vec<f64>) -> Result<Self> {
        let p = HGParamsF2nm { b1row, b_rest, a, c1row, c_rest };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b1row.is_empty() {
            return Err(Error::Domain("F2nm needs n >= 1".into()));
        }
        if self.b1row.len() != self.c1row.len() || self.b_rest.len() != self.c_rest.len() {
            return Err(Error::Domain("row lengths differ".into()));
        }
        check_denominators("F2nm", self.c1row.iter().chain(&self.c_rest).copied())
    }

    pub fn n(&self) -> usize {
        self.b1row.len()
    }

    pub fn m(&self) -> usize {
        self.b_rest.len() + 1
    }

    /// The m = 2 case as an F₂⁽ⁿ⁾ parameter set.
    pub fn as_f2n(&self) -> Result<HGParamsF2n> {
        if self.m() != 2 {
            return Err(Error::Contract(format!("as_f2n needs m = 2, got {}", self.m())));
        }
        HGParamsF2n::new(self.b1row.clone(), self.b_rest[0], self.a, self.c1row.clone(), self.c_rest[0])
    }

    /// Lauricella F_A parameters (n = 1): (a; b₁…b_m; c₁…c_m).
    pub fn lauricella_a(a: f64, b: &[f64], c: &[f64]) -> Result<Self> {
        if b.is_empty() || b.len() != c.len() {
            return Err(Error::Domain("F_A needs matching nonempty b and c".into()));
        }
        HGParamsF2nm::new(vec![b[0]], b[1..].to_vec(), a, vec![c[0]], c[1..].to_vec())
    }

    /// Numerator and denominator for variable k when n = 1.
    pub fn fa_pair(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (self.b1row[0], self.c1row[0])
        } else {
            (self.b_rest[k - 1], self.c_rest[k - 1])
        }
    }
}

/// Parameters (a, b, c₁, c₂) of Appell's F₄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppellF4Params {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
}

impl AppellF4Params {
    pub fn new(a: f64, b: f64, c1: f64, c2: f64) -> Result<Self> {
        check_denominators("F4", [c1, c2])?;
        Ok(AppellF4Params { a, b, c1, c2 })
    }
}

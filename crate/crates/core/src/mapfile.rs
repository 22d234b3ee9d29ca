//! JSON file format for composite operators and Choi matrices.
//!
//! ```json
//! { "n": 2, "m": 2, "choi": [[1.0, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `choi` lists the `(n·m)²` entries as `[re, im]` pairs in row-major order,
//! composite index `i·m + r`. Numbers are written with 17 significant digits so
//! that write-then-read reproduces every entry bit for bit. An optional finite
//! `violation` number accompanies witness files.

use std::fmt::Write as _;

use num_complex::Complex;
use serde_json::Value;

use crate::choi::MapRep;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Dims};

#[derive(Debug, Clone, PartialEq)]
pub struct MapFile {
    pub dims: Dims,
    pub choi: CMatrix<f64>,
    pub violation: Option<f64>,
}

impl MapFile {
    pub fn new(dims: Dims, choi: CMatrix<f64>) -> Result<Self> {
        dims.check(&choi)?;
        Ok(Self {
            dims,
            choi,
            violation: None,
        })
    }

    pub fn from_map(map: &MapRep<f64>) -> Self {
        Self {
            dims: map.dims(),
            choi: map.choi().clone(),
            violation: None,
        }
    }

    pub fn with_violation(mut self, v: f64) -> Self {
        self.violation = Some(v);
        self
    }

    pub fn to_map(&self) -> MapRep<f64> {
        MapRep::from_choi(self.dims, self.choi.clone()).expect("validated on construction")
    }

    /// Parses a map file. Malformed JSON or missing/invalid fields give
    /// [`Error::Parse`]; entry counts that disagree with `n`, `m` give
    /// [`Error::DimensionMismatch`].
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("top level must be an object".into()))?;
        let dim = |key: &str| -> Result<usize> {
            let raw = obj
                .get(key)
                .ok_or_else(|| Error::Parse(format!("missing field `{key}`")))?;
            let k = raw
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("`{key}` must be a positive integer")))?;
            if k == 0 {
                return Err(Error::Parse(format!("`{key}` must be a positive integer")));
            }
            usize::try_from(k).map_err(|_| Error::Parse(format!("`{key}` too large")))
        };
        let (n, m) = (dim("n")?, dim("m")?);
        let entries = obj
            .get("choi")
            .ok_or_else(|| Error::Parse("missing field `choi`".into()))?
            .as_array()
            .ok_or_else(|| Error::Parse("`choi` must be an array".into()))?;
        let mut data = Vec::with_capacity(entries.len());
        for (k, e) in entries.iter().enumerate() {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse(format!("entry {k} must be a [re, im] pair")))?;
            let re = finite(&pair[0], k)?;
            let im = finite(&pair[1], k)?;
            data.push(Complex::new(re, im));
        }
        let violation = match obj.get("violation") {
            None | Some(Value::Null) => None,
            Some(v) => Some(finite(v, usize::MAX)?),
        };
        let dims = Dims::new(n, m)?;
        let total = dims.total();
        if data.len() != total * total {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for dims ({n}, {m}), expected {}",
                data.len(),
                total * total
            )));
        }
        let choi = CMatrix::from_vec(total, total, data)?;
        Ok(Self {
            dims,
            choi,
            violation,
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"n\": {},", self.dims.n);
        let _ = writeln!(out, "  \"m\": {},", self.dims.m);
        if let Some(v) = self.violation {
            let _ = writeln!(out, "  \"violation\": {},", fmt_f64(v));
        }
        let _ = writeln!(out, "  \"choi\": [");
        let entries = self.choi.as_slice();
        for (k, z) in entries.iter().enumerate() {
            let sep = if k + 1 == entries.len() { "" } else { "," };
            let _ = writeln!(out, "    [{}, {}]{sep}", fmt_f64(z.re), fmt_f64(z.im));
        }
        let _ = writeln!(out, "  ]");
        let _ = writeln!(out, "}}");
        out
    }
}

fn finite(v: &Value, k: usize) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::Parse(format!("entry {k}: expected a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("entry {k}: non-finite number")));
    }
    Ok(x)
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

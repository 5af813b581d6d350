//! JSON file formats: single matrices and hypothesis-family instances.
//!
//! A matrix file is `{"rows": r, "cols": c, "data": [[entry, ...], ...]}`
//! where each entry is either a real number or a two-element `[re, im]`
//! array, row-major. An instance file wraps four named blocks:
//! `{"kind": "pseudo_block", "family": "...", "P": {...}, "Q": {...}, ...}`
//! or the same with kind `"block2x2"` and blocks A, B, C, D.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use drazin_core::additive::{PseudoBlockFamily, PseudoBlockInstance};
use drazin_core::block2x2::BlockInstance;
use drazin_core::{CMatrix, Error, Result};

/// One scalar entry: plain real or `[re, im]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryRepr {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Complex64> for EntryRepr {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            EntryRepr::Real(z.re)
        } else {
            EntryRepr::Complex([z.re, z.im])
        }
    }
}

impl From<EntryRepr> for Complex64 {
    fn from(e: EntryRepr) -> Self {
        match e {
            EntryRepr::Real(x) => Complex64::new(x, 0.0),
            EntryRepr::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Serialized dense matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<EntryRepr>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j).into()).collect())
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows {
            return Err(Error::Shape(format!(
                "data has {} rows, header says {}",
                self.data.len(),
                self.rows
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, header says {}",
                    row.len(),
                    self.cols
                )));
            }
            entries.extend(row.iter().map(|&e| Complex64::from(e)));
        }
        CMatrix::from_rows(self.rows, self.cols, entries)
    }
}

/// Serialized instance of either kind. The JSON tag is `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InstanceFile {
    #[serde(rename = "pseudo_block")]
    PseudoBlock {
        family: String,
        #[serde(rename = "P")]
        p: MatrixFile,
        #[serde(rename = "Q")]
        q: MatrixFile,
        #[serde(rename = "R")]
        r: MatrixFile,
        #[serde(rename = "S")]
        s: MatrixFile,
    },
    #[serde(rename = "block2x2")]
    Block2x2 {
        family: String,
        #[serde(rename = "A")]
        a: MatrixFile,
        #[serde(rename = "B")]
        b: MatrixFile,
        #[serde(rename = "C")]
        c: MatrixFile,
        #[serde(rename = "D")]
        d: MatrixFile,
    },
}

/// A loaded instance ready for library calls.
pub enum LoadedInstance {
    Pseudo(PseudoBlockInstance),
    Block(BlockInstance),
}

impl InstanceFile {
    pub fn from_pseudo(inst: &PseudoBlockInstance) -> Self {
        InstanceFile::PseudoBlock {
            family: inst.family.name().to_string(),
            p: MatrixFile::from_matrix(&inst.p),
            q: MatrixFile::from_matrix(&inst.q),
            r: MatrixFile::from_matrix(&inst.r),
            s: MatrixFile::from_matrix(&inst.s),
        }
    }

    pub fn from_block(inst: &BlockInstance, family: &str) -> Self {
        InstanceFile::Block2x2 {
            family: family.to_string(),
            a: MatrixFile::from_matrix(&inst.a),
            b: MatrixFile::from_matrix(&inst.b),
            c: MatrixFile::from_matrix(&inst.c),
            d: MatrixFile::from_matrix(&inst.d),
        }
    }

    pub fn load(&self) -> Result<LoadedInstance> {
        match self {
            InstanceFile::PseudoBlock { family, p, q, r, s } => {
                let fam = PseudoBlockFamily::parse(family).unwrap_or(PseudoBlockFamily::Basic);
                Ok(LoadedInstance::Pseudo(PseudoBlockInstance::new(
                    p.to_matrix()?,
                    q.to_matrix()?,
                    r.to_matrix()?,
                    s.to_matrix()?,
                    fam,
                )?))
            }
            InstanceFile::Block2x2 { a, b, c, d, .. } => {
                Ok(LoadedInstance::Block(BlockInstance::new(
                    a.to_matrix()?,
                    b.to_matrix()?,
                    c.to_matrix()?,
                    d.to_matrix()?,
                )?))
            }
        }
    }
}

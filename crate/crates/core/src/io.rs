//! File schema shared by every command: `{ "d": int, "entries": [[re, im], ...] }`
//! in row-major order, `d²` entries for vectors and `d⁴` for operators.

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::tensor::{BipartiteVector, DensityMatrix, HermitianOperator, Operator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArrayFile {
    pub d: usize,
    pub entries: Vec<[f64; 2]>,
}

impl ArrayFile {
    pub fn from_vector(v: &BipartiteVector) -> Self {
        Self { d: v.d(), entries: v.amps().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn from_matrix(d: usize, m: &CMatrix) -> Self {
        let n = m.nrows();
        let entries = (0..n * n).map(|idx| {
            let z = m[(idx / n, idx % n)];
            [z.re, z.im]
        });
        Self { d, entries: entries.collect() }
    }

    fn complex(&self) -> impl Iterator<Item = C64> + '_ {
        self.entries.iter().map(|[re, im]| C64::new(*re, *im))
    }

    pub fn to_vector(&self) -> Result<BipartiteVector> {
        let n = self.d * self.d;
        if self.entries.len() != n {
            return Err(Error::Format(format!(
                "vector with d = {} needs {n} entries, found {}",
                self.d,
                self.entries.len()
            )));
        }
        BipartiteVector::from_vector(self.d, CVector::from_iterator(n, self.complex()))
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.d * self.d;
        if self.entries.len() != n * n {
            return Err(Error::Format(format!(
                "operator with d = {} needs {} entries, found {}",
                self.d,
                n * n,
                self.entries.len()
            )));
        }
        // entries are row-major; nalgebra's from_row_iterator matches
        Ok(CMatrix::from_row_iterator(n, n, self.complex()))
    }

    pub fn to_operator(&self) -> Result<Operator> {
        Operator::new(self.d, self.to_matrix()?)
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.d, self.to_matrix()?)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_hermitian()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        if file.d == 0 {
            return Err(Error::Format(format!("{}: d must be positive", path.display())));
        }
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

impl Serialize for BipartiteVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrayFile::from_vector(self).serialize(s)
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrayFile::from_matrix(self.d(), self.matrix()).serialize(s)
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_operator().serialize(s)
    }
}

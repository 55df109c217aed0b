//! Matrix files: a JSON object `{"dim": n, "data": [row-major reals], "name": "..."}`.
//! Lines may carry `#` comments anywhere outside string literals.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use psdeq_core::SymMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

/// Asymmetry beyond `ASYMMETRY_WARN · max(1, max|entry|)` is reported when loading.
pub const ASYMMETRY_WARN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub dim: usize,
    pub data: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &SymMatrix, name: Option<&str>) -> Self {
        MatrixDocument {
            dim: m.dim(),
            data: m.to_row_major(),
            name: name.map(str::to_owned),
        }
    }

    /// Validates the shape and symmetrizes. Returns the matrix and the raw asymmetry.
    pub fn to_matrix(&self) -> Result<(SymMatrix, f64), Failure> {
        if self.dim == 0 {
            return Err(Failure::input("dim must be at least 1"));
        }
        let expected = self.dim.checked_mul(self.dim);
        if expected != Some(self.data.len()) {
            return Err(Failure::input(format!(
                "data has {} entries, expected dim² = {}",
                self.data.len(),
                self.dim * self.dim
            )));
        }
        let raw = DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        let asym = SymMatrix::max_asymmetry(&raw);
        let m = SymMatrix::new(raw).map_err(Failure::from)?;
        Ok((m, asym))
    }
}

/// Removes `#` comments that sit outside JSON strings.
pub fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut in_comment = false;
    for c in text.chars() {
        if in_comment {
            if c == '\n' {
                in_comment = false;
                out.push(c);
            }
            continue;
        }
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '#' => in_comment = true,
            '"' => {
                in_string = true;
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out
}

pub fn parse_document(text: &str) -> Result<MatrixDocument, Failure> {
    serde_json::from_str(&strip_comments(text)).map_err(|e| Failure::input(format!("malformed matrix document: {e}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
    pub dim: usize,
}

#[derive(Debug)]
pub struct LoadedMatrix {
    pub matrix: SymMatrix,
    pub digest: InputDigest,
    pub warning: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_matrix(role: &str, path: &Path) -> Result<LoadedMatrix, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|_| Failure::input(format!("{} is not valid UTF-8", path.display())))?;
    let doc = parse_document(text).map_err(|f| f.context(&path.display().to_string()))?;
    let (matrix, asym) = doc.to_matrix().map_err(|f| f.context(&path.display().to_string()))?;
    let scale = matrix.max_abs().max(1.0);
    let warning = (asym > ASYMMETRY_WARN * scale).then(|| {
        format!(
            "{role} ({}) is not symmetric (max |M - Mᵀ| = {asym:.3e}); using (M + Mᵀ)/2",
            path.display()
        )
    });
    Ok(LoadedMatrix {
        digest: InputDigest {
            role: role.to_owned(),
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            dim: matrix.dim(),
        },
        matrix,
        warning,
    })
}

//! Raw matrix dump for debugging and cross-implementation diffs: a row-major
//! little-endian `f64` file plus a JSON sidecar `{n, areas, totalArea}`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{BemError, GalerkinSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DumpSidecar {
    pub n: usize,
    pub areas: Vec<f64>,
    pub total_area: f64,
}

pub fn write_matrix_dump(
    system: &GalerkinSystem,
    matrix_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
) -> Result<(), BemError> {
    let n = system.len();
    let m = system.matrix();
    let mut out = BufWriter::new(fs::File::create(matrix_path)?);
    for i in 0..n {
        for j in 0..n {
            out.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    out.flush()?;
    let sidecar = DumpSidecar {
        n,
        areas: system.areas().iter().copied().collect(),
        total_area: system.total_area(),
    };
    fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

/// Reads a dump back as `(matrix, areas, sidecar)`.
pub fn read_matrix_dump(
    matrix_path: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
) -> Result<(DMatrix<f64>, DVector<f64>, DumpSidecar), BemError> {
    let sidecar: DumpSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path)?)?;
    let bytes = fs::read(matrix_path)?;
    let n = sidecar.n;
    if bytes.len() != 8 * n * n || sidecar.areas.len() != n {
        return Err(BemError::DimensionMismatch(format!(
            "dump holds {} bytes and {} areas, sidecar says n = {n}",
            bytes.len(),
            sidecar.areas.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let matrix = DMatrix::from_row_iterator(n, n, values);
    let areas = DVector::from_vec(sidecar.areas.clone());
    Ok((matrix, areas, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::{assemble, QuadratureRule};
    use crate::geometry::{build_panels, make_icosphere};

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sys = assemble(
            &build_panels(&make_icosphere(1.0, 0).unwrap()),
            &QuadratureRule::of_order(2).unwrap(),
        )
        .unwrap();
        let (bin, json) = (dir.path().join("a.bin"), dir.path().join("a.json"));
        write_matrix_dump(&sys, &bin, &json).unwrap();
        assert_eq!(fs::metadata(&bin).unwrap().len(), 8 * 20 * 20);
        let (m, areas, side) = read_matrix_dump(&bin, &json).unwrap();
        assert_eq!(&m, sys.matrix());
        assert_eq!(&areas, sys.areas());
        assert_eq!(side.total_area, sys.total_area());
    }
}

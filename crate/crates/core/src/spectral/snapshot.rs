//! `PSLF` binary field snapshots (little-endian).
//!
//! ```text
//! magic "PSLF" | version u32 | n1 n2 n3 u32 | box_length f64
//! | representation u8 (0 spectral, 1 physical) | time f64
//! | x, y, z components: n³ (re f64, im f64) pairs each, row-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::field::{Representation, VectorField};
use super::grid::Grid3;
use crate::error::{LabError, Result};

pub const MAGIC: &[u8; 4] = b"PSLF";
pub const VERSION: u32 = 1;

/// A field together with its time tag.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: VectorField,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &VectorField, time: f64) -> Result<()> {
    let grid = field.grid();
    let n = grid.n() as u32;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for _ in 0..3 {
        w.write_all(&n.to_le_bytes())?;
    }
    w.write_all(&grid.box_length().to_le_bytes())?;
    match field.representation() {
        Representation::Spectral => {
            w.write_all(&[0u8])?;
            w.write_all(&time.to_le_bytes())?;
            for comp in field.spectral()? {
                for v in comp {
                    w.write_all(&v.re.to_le_bytes())?;
                    w.write_all(&v.im.to_le_bytes())?;
                }
            }
        }
        Representation::Physical => {
            w.write_all(&[1u8])?;
            w.write_all(&time.to_le_bytes())?;
            for comp in field.physical()? {
                for v in comp {
                    w.write_all(&v.to_le_bytes())?;
                    w.write_all(&0f64.to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> LabError {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        LabError::Format("truncated snapshot".into())
    } else {
        LabError::Io(e)
    }
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(LabError::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(LabError::Format(format!("unsupported snapshot version {version}")));
    }
    let dims = [read_u32(&mut r)?, read_u32(&mut r)?, read_u32(&mut r)?];
    if dims[0] != dims[1] || dims[1] != dims[2] {
        return Err(LabError::Format(format!("non-cubic grid {dims:?}")));
    }
    let box_length = read_f64(&mut r)?;
    let grid = Grid3::new(dims[0] as usize, box_length).map_err(|e| LabError::Format(e.to_string()))?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag).map_err(truncated)?;
    let time = read_f64(&mut r)?;
    let n3 = grid.len();
    let mut comps: [Vec<Complex64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n3));
    for comp in comps.iter_mut() {
        for _ in 0..n3 {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            comp.push(Complex64::new(re, im));
        }
    }
    let field = match flag[0] {
        0 => VectorField::from_spectral(grid, comps)?,
        1 => VectorField::from_physical(grid, comps.map(|c| c.into_iter().map(|v| v.re).collect()))?,
        other => return Err(LabError::Format(format!("unknown representation flag {other}"))),
    };
    Ok(Snapshot { field, time })
}

pub fn save_snapshot(path: impl AsRef<Path>, field: &VectorField, time: f64) -> Result<()> {
    write_snapshot(BufWriter::new(File::create(path)?), field, time)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_snapshot(BufReader::new(File::open(path)?))
}

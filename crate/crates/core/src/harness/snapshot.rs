//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content               |
//! |--------|------|-----------------------|
//! | 0      | 4    | magic `NAEV`          |
//! | 4      | 4    | format version `1`    |
//! | 8      | 4    | `nx` (u32)            |
//! | 12     | 4    | `ny` (u32)            |
//! | 16     | 8    | `Lx` (f64)            |
//! | 24     | 8    | `Ly` (f64)            |
//! | 32     | 8    | `t` (f64)             |
//! | 40     | 8·nx·ny | values, row-major  |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid2D};

pub const MAGIC: &[u8; 4] = b"NAEV";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: Field2D,
    pub t: f64,
}

pub fn write_snapshot(field: &Field2D, path: &Path, t: f64) -> Result<()> {
    let grid = field.grid();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(grid.nx() as u32).to_le_bytes())?;
    out.write_all(&(grid.ny() as u32).to_le_bytes())?;
    out.write_all(&grid.lx().to_le_bytes())?;
    out.write_all(&grid.ly().to_le_bytes())?;
    out.write_all(&t.to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bad = |reason: String| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    };
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let (nx, ny) = (u32_at(8) as usize, u32_at(12) as usize);
    let (lx, ly, t) = (f64_at(16), f64_at(24), f64_at(32));
    let expected = HEADER_LEN + 8 * nx * ny;
    if bytes.len() != expected {
        return Err(bad(format!(
            "size {} does not match {nx}×{ny} payload ({expected} bytes)",
            bytes.len()
        )));
    }
    let grid = Grid2D::new(nx, ny, lx, ly).map_err(|e| bad(e.to_string()))?;
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let field = Field2D::new(grid, values).map_err(|e| bad(e.to_string()))?;
    Ok(Snapshot { field, t })
}

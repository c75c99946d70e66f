//! Binary tensor format: `"STKT"`, `u16` version, `u16` rank, `rank × u64`
//! dimensions, then the `f64` payload in row-major order. All integers and
//! floats are little-endian.

use std::io::{Read, Write};

use ndarray::{ArrayD, IxDyn};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"STKT";
pub const VERSION: u16 = 1;

pub fn write_tensor<W: Write>(mut w: W, t: &ArrayD<f64>) -> Result<()> {
    let rank = u16::try_from(t.ndim()).map_err(|_| Error::Format("rank exceeds u16".into()))?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&rank.to_le_bytes())?;
    for &d in t.shape() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for v in t.iter() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<ArrayD<f64>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    r.read_exact(&mut b2)?;
    let rank = u16::from_le_bytes(b2) as usize;
    let mut shape = Vec::with_capacity(rank);
    let mut b8 = [0u8; 8];
    for _ in 0..rank {
        r.read_exact(&mut b8)?;
        shape.push(usize::try_from(u64::from_le_bytes(b8)).map_err(|_| Error::Format("dimension too large".into()))?);
    }
    let len = shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format("tensor too large".into()))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut b8)?;
        data.push(f64::from_le_bytes(b8));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    ArrayD::from_shape_vec(IxDyn(&shape), data).map_err(|e| Error::Format(e.to_string()))
}

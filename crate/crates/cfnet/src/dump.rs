//! Binary dump of one channel realization.
//!
//! Little-endian layout: magic `CFCH`, `u32` version, `u32` M, then for each
//! block `(m, n)` in row-major order `u32` rows, `u32` cols and rows x cols
//! complex64 values as `(f32 re, f32 im)` pairs, row-major. A block that was
//! not drawn is written with zero dimensions.

use std::io::{self, Read, Write};

use cfnet_core::{CMatrix, ChannelRealization, Complex64};

pub const MAGIC: &[u8; 4] = b"CFCH";
pub const VERSION: u32 = 1;

pub fn write_channel<W: Write>(channel: &ChannelRealization, mut out: W) -> io::Result<()> {
    let mm = channel.num_subnetworks();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(mm as u32).to_le_bytes())?;
    for m in 0..mm {
        for n in 0..mm {
            let (rows, cols, data) = match channel.try_block(m, n) {
                Some(g) => (g.rows(), g.cols(), g.as_slice()),
                None => (0, 0, &[][..]),
            };
            out.write_all(&(rows as u32).to_le_bytes())?;
            out.write_all(&(cols as u32).to_le_bytes())?;
            for z in data {
                out.write_all(&(z.re as f32).to_le_bytes())?;
                out.write_all(&(z.im as f32).to_le_bytes())?;
            }
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f32<R: Read>(r: &mut R) -> io::Result<f32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(f32::from_le_bytes(b))
}

/// Reads a dump back; missing blocks come back as `0 x 0` matrices.
pub fn read_channel<R: Read>(mut input: R) -> io::Result<(usize, Vec<CMatrix>)> {
    let invalid = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(invalid("bad magic"));
    }
    if read_u32(&mut input)? != VERSION {
        return Err(invalid("unsupported version"));
    }
    let mm = read_u32(&mut input)? as usize;
    let mut blocks = Vec::with_capacity(mm * mm);
    for _ in 0..mm * mm {
        let rows = read_u32(&mut input)? as usize;
        let cols = read_u32(&mut input)? as usize;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            let re = read_f32(&mut input)?;
            let im = read_f32(&mut input)?;
            data.push(Complex64::new(re as f64, im as f64));
        }
        blocks.push(CMatrix::from_vec(rows, cols, data).map_err(|e| invalid(&e.to_string()))?);
    }
    Ok((mm, blocks))
}

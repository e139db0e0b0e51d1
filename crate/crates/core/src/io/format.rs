//! Binary snapshot formats, all little-endian.
//!
//! Field (`GBOFLD01`): magic, `u64 n`, `f64 period`, `u8 tag` (0 real,
//! 1 complex), then `n` values or `2n` interleaved re/im values.
//!
//! Trajectory (`GBOTRJ01`): magic, `u64 n`, `f64 period`, `u64 count`,
//! `f64 t0`, `f64 dt`, then `count` complete field records.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Field, SpectralGrid};
use crate::trajectory::Trajectory;

pub const FIELD_MAGIC: &[u8; 8] = b"GBOFLD01";
pub const TRAJECTORY_MAGIC: &[u8; 8] = b"GBOTRJ01";

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format("truncated input".into()),
        _ => Error::Io(e),
    })?;
    Ok(buf)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<8>(r)?))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<8>(r)?))
}

fn expect_magic(r: &mut impl Read, magic: &[u8; 8]) -> Result<()> {
    let got = read_exact::<8>(r)?;
    if &got != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&got),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn grid_from_header(n: u64, period: f64) -> Result<SpectralGrid> {
    let n = usize::try_from(n).map_err(|_| Error::Format(format!("size {n} does not fit in memory")))?;
    SpectralGrid::new(n, period).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_field(w: &mut impl Write, f: &Field) -> Result<()> {
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(f.grid().n() as u64).to_le_bytes())?;
    w.write_all(&f.grid().period().to_le_bytes())?;
    if f.is_real() {
        w.write_all(&[0u8])?;
        for v in f.values() {
            w.write_all(&v.re.to_le_bytes())?;
        }
    } else {
        w.write_all(&[1u8])?;
        for v in f.values() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_field(r: &mut impl Read) -> Result<Field> {
    expect_magic(r, FIELD_MAGIC)?;
    let n = read_u64(r)?;
    let period = read_f64(r)?;
    let grid = grid_from_header(n, period)?;
    let tag = read_exact::<1>(r)?[0];
    match tag {
        0 => {
            let vals = (0..grid.n()).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
            Field::real(grid, vals)
        }
        1 => {
            let vals = (0..grid.n())
                .map(|_| Ok(Complex64::new(read_f64(r)?, read_f64(r)?)))
                .collect::<Result<Vec<_>>>()?;
            Field::complex(grid, vals)
        }
        t => Err(Error::Format(format!("unknown parity tag {t}"))),
    }
}

pub fn write_trajectory(w: &mut impl Write, u: &Trajectory) -> Result<()> {
    w.write_all(TRAJECTORY_MAGIC)?;
    w.write_all(&(u.grid().n() as u64).to_le_bytes())?;
    w.write_all(&u.grid().period().to_le_bytes())?;
    w.write_all(&(u.len() as u64).to_le_bytes())?;
    w.write_all(&u.t0().to_le_bytes())?;
    w.write_all(&u.dt().to_le_bytes())?;
    for f in u.frames() {
        write_field(w, f)?;
    }
    Ok(())
}

pub fn read_trajectory(r: &mut impl Read) -> Result<Trajectory> {
    expect_magic(r, TRAJECTORY_MAGIC)?;
    let grid = grid_from_header(read_u64(r)?, read_f64(r)?)?;
    let count = read_u64(r)?;
    let t0 = read_f64(r)?;
    let dt = read_f64(r)?;
    if count == 0 {
        return Err(Error::Format("trajectory with no frames".into()));
    }
    let mut frames = Vec::new();
    for m in 0..count {
        let f = read_field(r)?;
        if *f.grid() != grid {
            return Err(Error::Format(format!("frame {m} grid differs from the header")));
        }
        frames.push(f);
    }
    Trajectory::new(t0, dt, frames).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_field(path: impl AsRef<Path>, f: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: impl AsRef<Path>) -> Result<Field> {
    read_field(&mut BufReader::new(File::open(path)?))
}

pub fn save_trajectory(path: impl AsRef<Path>, u: &Trajectory) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_trajectory(&mut w, u)?;
    w.flush()?;
    Ok(())
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<Trajectory> {
    read_trajectory(&mut BufReader::new(File::open(path)?))
}

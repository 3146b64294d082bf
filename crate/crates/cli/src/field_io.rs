//! Self-describing binary dump of a sampled field.
//!
//! Layout, all little endian:
//!
//! | bytes | content                                   |
//! |-------|-------------------------------------------|
//! | 8     | magic `HRTFIELD`                          |
//! | 4     | format version (`u32`, currently 1)       |
//! | 4     | domain (`u32`: 0 physical, 1 frequency)   |
//! | 8     | grid points `n` (`u64`)                   |
//! | 8     | `r_max` (`f64`)                           |
//! | 8     | sample count (`u64`)                      |
//! | 16 k  | samples as interleaved `re, im` (`f64`)   |
//!
//! The sample count equals `n`; it is stored separately so that a reader
//! can size its buffer without knowing the grid convention.

use std::io::{self, Read, Write};

use hartree_core::{RadialField, RadialGrid, SpectralField};
use num_complex::Complex64;

pub const MAGIC: &[u8; 8] = b"HRTFIELD";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Physical = 0,
    Frequency = 1,
}

/// A field read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum StoredField {
    Physical(RadialField),
    Frequency(SpectralField),
}

fn encode(out: &mut impl Write, domain: Domain, grid: &RadialGrid, values: &[Complex64]) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(domain as u32).to_le_bytes())?;
    out.write_all(&(grid.n_points() as u64).to_le_bytes())?;
    out.write_all(&grid.r_max().to_le_bytes())?;
    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn encode_physical(f: &RadialField) -> Vec<u8> {
    let mut buf = Vec::with_capacity(40 + 16 * f.values().len());
    encode(&mut buf, Domain::Physical, f.grid(), f.values()).expect("writing to memory");
    buf
}

pub fn encode_frequency(f: &SpectralField) -> Vec<u8> {
    let mut buf = Vec::with_capacity(40 + 16 * f.values().len());
    encode(&mut buf, Domain::Frequency, f.grid(), f.values()).expect("writing to memory");
    buf
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn take<const N: usize>(r: &mut impl Read) -> io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn decode(r: &mut impl Read) -> io::Result<StoredField> {
    if &take::<8>(r)? != MAGIC {
        return Err(bad("not a field file (bad magic)"));
    }
    let version = u32::from_le_bytes(take(r)?);
    if version != VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let domain = u32::from_le_bytes(take(r)?);
    let n = u64::from_le_bytes(take(r)?) as usize;
    let r_max = f64::from_le_bytes(take(r)?);
    let count = u64::from_le_bytes(take(r)?) as usize;
    if count != n {
        return Err(bad(format!("sample count {count} does not match grid size {n}")));
    }
    let grid = RadialGrid::new(n, r_max).map_err(|e| bad(e.to_string()))?;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(take(r)?);
        let im = f64::from_le_bytes(take(r)?);
        values.push(Complex64::new(re, im));
    }
    let invalid = |e: hartree_core::Error| bad(e.to_string());
    match domain {
        0 => RadialField::new(grid, values).map(StoredField::Physical).map_err(invalid),
        1 => SpectralField::new(grid, values).map(StoredField::Frequency).map_err(invalid),
        d => Err(bad(format!("unknown domain tag {d}"))),
    }
}

pub fn read_field(path: &std::path::Path) -> io::Result<StoredField> {
    decode(&mut io::BufReader::new(std::fs::File::open(path)?))
}

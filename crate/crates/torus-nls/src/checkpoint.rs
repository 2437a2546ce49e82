//! Binary checkpoint format for simulation state.
//!
//! Layout (all little-endian):
//!
//! | bytes | content                                      |
//! |-------|----------------------------------------------|
//! | 4     | magic `"TNLS"`                               |
//! | 4     | format version (`u32`, currently 1)          |
//! | 4     | modes per axis `M` (`u32`)                   |
//! | 24    | Laplacian coefficients `beta_1..beta_3` (f64)|
//! | 8     | nonlinearity power `p` (f64)                 |
//! | 8     | simulation time `t` (f64)                    |
//! | 16M^3 | coefficients, `(re, im)` f64 pairs           |
//!
//! The body is in row-major order over the axes `(k1, k2, k3)` with indices
//! in DFT order, exactly as stored in [`SpectralField`]. Round-trips are
//! bit-exact. Torus side lengths are recovered as `beta^{-1/2}` on load and
//! re-derived through [`TorusSpec::from_lengths`].

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};
use crate::torus::TorusSpec;

const MAGIC: &[u8; 4] = b"TNLS";
const VERSION: u32 = 1;

/// Everything a checkpoint stores.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub field: SpectralField,
    pub torus: TorusSpec,
    pub p: f64,
    pub t: f64,
}

pub fn write_checkpoint(
    mut w: impl Write,
    field: &SpectralField,
    torus: &TorusSpec,
    p: f64,
    t: f64,
) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u32::<LittleEndian>(field.grid().modes_per_axis() as u32)?;
    for b in torus.betas() {
        w.write_f64::<LittleEndian>(b)?;
    }
    w.write_f64::<LittleEndian>(p)?;
    w.write_f64::<LittleEndian>(t)?;
    for c in field.coeffs().iter() {
        w.write_f64::<LittleEndian>(c.re)?;
        w.write_f64::<LittleEndian>(c.im)?;
    }
    Ok(())
}

/// Read a checkpoint, attaching the given dealiasing factor to the grid
/// (padding is a runtime knob, not field data).
pub fn read_checkpoint(mut r: impl Read, padded_factor: usize) -> Result<Checkpoint> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadCheckpoint(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::BadCheckpoint(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let m = r.read_u32::<LittleEndian>()? as usize;
    let grid = Grid::with_padding(m, padded_factor)
        .map_err(|e| Error::BadCheckpoint(format!("bad grid size {m}: {e}")))?;
    let mut betas = [0.0f64; 3];
    for b in &mut betas {
        *b = r.read_f64::<LittleEndian>()?;
    }
    let lengths = [
        betas[0].powf(-0.5),
        betas[1].powf(-0.5),
        betas[2].powf(-0.5),
    ];
    let torus = TorusSpec::from_lengths(lengths)
        .map_err(|e| Error::BadCheckpoint(format!("bad betas {betas:?}: {e}")))?;
    let p = r.read_f64::<LittleEndian>()?;
    let t = r.read_f64::<LittleEndian>()?;

    let mut coeffs = ndarray::Array3::default((m, m, m));
    for c in coeffs.iter_mut() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        *c = Complex64::new(re, im);
    }
    let field = SpectralField::from_coeffs(grid, coeffs)?;
    Ok(Checkpoint { field, torus, p, t })
}

pub fn write_checkpoint_file(
    path: impl AsRef<Path>,
    field: &SpectralField,
    torus: &TorusSpec,
    p: f64,
    t: f64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut w, field, torus, p, t)?;
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint_file(path: impl AsRef<Path>, padded_factor: usize) -> Result<Checkpoint> {
    read_checkpoint(BufReader::new(File::open(path)?), padded_factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = Grid::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let coeffs = ndarray::Array3::from_shape_fn((8, 8, 8), |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let field = SpectralField::from_coeffs(grid, coeffs).unwrap();
        let torus = TorusSpec::quartic_irrational();

        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &field, &torus, 4.0, 0.625).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 4 + 3 * 8 + 8 + 8 + 8 * 8 * 8 * 16);

        let ck = read_checkpoint(buf.as_slice(), 2).unwrap();
        assert_eq!(ck.p, 4.0);
        assert_eq!(ck.t, 0.625);
        assert_eq!(ck.field.coeffs(), field.coeffs());
        for (a, b) in ck.torus.betas().iter().zip(torus.betas()) {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let grid = Grid::new(4).unwrap();
        let field = SpectralField::zeros(grid);
        let torus = TorusSpec::unit();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &field, &torus, 4.0, 0.0).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_checkpoint(bad.as_slice(), 2),
            Err(Error::BadCheckpoint(_))
        ));

        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(
            read_checkpoint(bad.as_slice(), 2),
            Err(Error::BadCheckpoint(_))
        ));

        let truncated = &buf[..buf.len() - 3];
        assert!(read_checkpoint(truncated, 2).is_err());
    }
}

//! Binary model files.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    8 bytes  "ODIMDP\0\x01"
//! version  u32      1
//! kind     u32      0 = odIMDP, 1 = IMDP, 2 = mixture
//! body
//! ```
//!
//! An odIMDP body is `n: u32`, `n` axis sizes as `u64`, the action labels
//! (`count: u64`, then `len: u32` + UTF-8 bytes each), and then for every
//! source (lexicographic, axis 0 slowest) and action, for every axis, the
//! lower then upper bounds as `f64`. An IMDP body is `num_states: u64`, the
//! labels, optional axis sizes (`flag: u8`, then as above) and the dense
//! `lower[|S|] upper[|S|]` rows. A mixture body is `K: u32`, `K` odIMDP
//! bodies, then the weight rows `lower[K] upper[K]` per `(s, a)`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use odimdp::models::{Imdp, MixtureOdImdp, OdImdp};

use crate::CliError;

pub const MAGIC: [u8; 8] = *b"ODIMDP\0\x01";
pub const VERSION: u32 = 1;

/// Any model that can live in a model file.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelFile {
    OdImdp(OdImdp),
    Imdp(Imdp),
    Mixture(MixtureOdImdp),
}

fn put_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn put_f64s(w: &mut impl Write, vs: &[f64]) -> io::Result<()> {
    for v in vs {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn put_labels(w: &mut impl Write, labels: &[String]) -> io::Result<()> {
    put_u64(w, labels.len() as u64)?;
    for l in labels {
        put_u32(w, l.len() as u32)?;
        w.write_all(l.as_bytes())?;
    }
    Ok(())
}

fn put_sizes(w: &mut impl Write, sizes: &[usize]) -> io::Result<()> {
    put_u32(w, sizes.len() as u32)?;
    sizes.iter().try_for_each(|&m| put_u64(w, m as u64))
}

fn put_odimdp(w: &mut impl Write, m: &OdImdp) -> io::Result<()> {
    put_sizes(w, m.axis_sizes())?;
    put_labels(w, m.action_labels())?;
    put_f64s(w, m.raw())
}

pub fn write_model(w: &mut impl Write, model: &ModelFile) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    put_u32(w, VERSION)?;
    match model {
        ModelFile::OdImdp(m) => {
            put_u32(w, 0)?;
            put_odimdp(w, m)
        }
        ModelFile::Imdp(m) => {
            put_u32(w, 1)?;
            put_u64(w, m.num_states() as u64)?;
            put_labels(w, m.action_labels())?;
            match m.axis_sizes() {
                Some(sizes) => {
                    w.write_all(&[1])?;
                    put_sizes(w, sizes)?;
                }
                None => w.write_all(&[0])?,
            }
            put_f64s(w, m.raw())
        }
        ModelFile::Mixture(m) => {
            put_u32(w, 2)?;
            put_u32(w, m.num_components() as u32)?;
            m.components().iter().try_for_each(|c| put_odimdp(w, c))?;
            put_f64s(w, m.raw_weights())
        }
    }
}

pub fn save(path: &Path, model: &ModelFile) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_model(&mut w, model)?;
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> io::Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b)?;
        Ok(b)
    }

    fn u32(&mut self) -> io::Result<u32> {
        self.bytes().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> io::Result<u64> {
        self.bytes().map(u64::from_le_bytes)
    }

    fn usize(&mut self) -> Result<usize, CliError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| CliError::Format(format!("count {v} does not fit in memory")))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>, CliError> {
        // read in bounded chunks so a corrupt count fails on EOF, not on allocation
        let mut out = Vec::new();
        let mut buf = vec![0u8; 8 * 4096];
        let mut left = count;
        while left > 0 {
            let take = left.min(4096);
            self.inner.read_exact(&mut buf[..8 * take])?;
            out.extend(
                buf[..8 * take]
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))),
            );
            left -= take;
        }
        Ok(out)
    }

    fn labels(&mut self) -> Result<Vec<String>, CliError> {
        let count = self.usize()?;
        let mut labels = Vec::new();
        for _ in 0..count {
            let len = self.u32()? as usize;
            let mut b = vec![0u8; len.min(1 << 16)];
            if len > b.len() {
                return Err(CliError::Format("action label too long".into()));
            }
            self.inner.read_exact(&mut b)?;
            labels.push(String::from_utf8(b).map_err(|_| CliError::Format("label is not UTF-8".into()))?);
        }
        Ok(labels)
    }

    fn sizes(&mut self) -> Result<Vec<usize>, CliError> {
        let n = self.u32()? as usize;
        (0..n).map(|_| self.usize()).collect()
    }

    fn odimdp(&mut self) -> Result<OdImdp, CliError> {
        let sizes = self.sizes()?;
        let labels = self.labels()?;
        let states = sizes
            .iter()
            .try_fold(1usize, |a, &m| a.checked_mul(m))
            .ok_or_else(|| CliError::Format("state count overflows".into()))?;
        let row = 2 * sizes.iter().sum::<usize>();
        let count = states
            .checked_mul(labels.len())
            .and_then(|c| c.checked_mul(row))
            .ok_or_else(|| CliError::Format("table size overflows".into()))?;
        let data = self.f64s(count)?;
        Ok(OdImdp::new(sizes, labels, data)?)
    }
}

pub fn read_model(r: impl Read) -> Result<ModelFile, CliError> {
    let mut r = Reader { inner: r };
    if r.bytes::<8>()? != MAGIC {
        return Err(CliError::Format("not a model file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CliError::Format(format!("unsupported model file version {version}")));
    }
    match r.u32()? {
        0 => Ok(ModelFile::OdImdp(r.odimdp()?)),
        1 => {
            let states = r.usize()?;
            let labels = r.labels()?;
            let sizes = match r.bytes::<1>()?[0] {
                0 => None,
                _ => Some(r.sizes()?),
            };
            let count = states
                .checked_mul(states)
                .and_then(|c| c.checked_mul(2 * labels.len()))
                .ok_or_else(|| CliError::Format("table size overflows".into()))?;
            let data = r.f64s(count)?;
            let mut m = Imdp::new(states, labels, data)?;
            if let Some(sizes) = sizes {
                m = m.with_axis_sizes(sizes)?;
            }
            Ok(ModelFile::Imdp(m))
        }
        2 => {
            let k = r.u32()? as usize;
            let components = (0..k).map(|_| r.odimdp()).collect::<Result<Vec<_>, _>>()?;
            let rows = components.first().map_or(0, |c| c.num_states() * c.num_actions());
            let weights = r.f64s(2 * k * rows)?;
            Ok(ModelFile::Mixture(MixtureOdImdp::new(components, weights)?))
        }
        kind => Err(CliError::Format(format!("unknown model kind {kind}"))),
    }
}

pub fn load(path: &Path) -> Result<ModelFile, CliError> {
    read_model(BufReader::new(File::open(path)?))
}

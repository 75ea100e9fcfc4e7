//! Binary model checkpoints: header, sparse `W_x`/`W_u` as coordinate
//! triplets, dense readouts in column-major order. Little-endian throughout.

use std::path::Path;

use nalgebra::DMatrix;

use super::{CsrMatrix, EsnHyperParams, EsnModel, NoiseScale, Partition, Readout, Reservoir};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"RWM1";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint(model: &EsnModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, checkpoint_bytes(model)).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<EsnModel> {
    let path = path.as_ref();
    checkpoint_from_bytes(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn checkpoint_bytes(model: &EsnModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    let hp = model.hyperparams();
    let put_u64 = |out: &mut Vec<u8>, v: u64| out.extend_from_slice(&v.to_le_bytes());
    let put_f64 = |out: &mut Vec<u8>, v: f64| out.extend_from_slice(&v.to_le_bytes());
    put_u64(&mut out, hp.d_s as u64);
    put_u64(&mut out, hp.degree as u64);
    put_f64(&mut out, hp.rho);
    put_f64(&mut out, hp.alpha);
    put_f64(&mut out, hp.beta);
    put_u64(&mut out, hp.n_w as u64);
    put_f64(&mut out, hp.noise_var);
    out.push(match hp.noise_scale {
        NoiseScale::Variance => 0,
        NoiseScale::StdDev => 1,
    });
    put_u64(&mut out, hp.input_degree as u64);
    put_u64(&mut out, hp.seed);
    let part = model.partition();
    put_u64(&mut out, part.width() as u64);
    put_u64(&mut out, part.m_reservoirs() as u64);
    put_u64(&mut out, part.overlap() as u64);
    for m in [model.reservoir().w_x(), model.reservoir().w_u()] {
        put_u64(&mut out, m.rows() as u64);
        put_u64(&mut out, m.cols() as u64);
        let triplets = m.triplets();
        put_u64(&mut out, triplets.len() as u64);
        for (r, c, v) in triplets {
            put_u64(&mut out, r as u64);
            put_u64(&mut out, c as u64);
            put_f64(&mut out, v);
        }
    }
    let readout = model.readout();
    out.push(match readout {
        Readout::Shared(_) => 0,
        Readout::Independent(_) => 1,
    });
    let mats = readout.matrices();
    put_u64(&mut out, mats.len() as u64);
    for w in mats {
        put_u64(&mut out, w.nrows() as u64);
        put_u64(&mut out, w.ncols() as u64);
        for v in w.iter() {
            put_f64(&mut out, *v);
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| {
            Error::Format(format!(
                "checkpoint truncated reading {what}: need {n} bytes at offset {}, file has {}",
                self.pos,
                self.bytes.len()
            ))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let v = self.u64(what)?;
        usize::try_from(v).map_err(|_| Error::Format(format!("{what} = {v} does not fit in memory")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn sparse(&mut self, what: &str) -> Result<CsrMatrix> {
        let rows = self.usize(what)?;
        let cols = self.usize(what)?;
        let nnz = self.usize(what)?;
        let mut triplets = Vec::with_capacity(nnz.min(self.bytes.len() / 24));
        for _ in 0..nnz {
            triplets.push((self.usize(what)?, self.usize(what)?, self.f64(what)?));
        }
        CsrMatrix::from_triplets(rows, cols, &triplets).map_err(|e| Error::Format(format!("{what}: {e}")))
    }
}

pub fn checkpoint_from_bytes(bytes: &[u8]) -> Result<EsnModel> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4, "magic")?;
    if magic != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!("bad checkpoint magic {magic:?}")));
    }
    let version = u32::from_le_bytes(cur.take(4, "version")?.try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "checkpoint version {version}, this build reads {CHECKPOINT_VERSION}"
        )));
    }
    let hp = EsnHyperParams {
        d_s: cur.usize("d_s")?,
        degree: cur.usize("degree")?,
        rho: cur.f64("rho")?,
        alpha: cur.f64("alpha")?,
        beta: cur.f64("beta")?,
        n_w: cur.usize("n_w")?,
        noise_var: cur.f64("noise_var")?,
        noise_scale: match cur.u8("noise scale")? {
            0 => NoiseScale::Variance,
            1 => NoiseScale::StdDev,
            other => return Err(Error::Format(format!("unknown noise scale tag {other}"))),
        },
        input_degree: cur.usize("input_degree")?,
        seed: cur.u64("seed")?,
    };
    let width = cur.usize("width")?;
    let m_reservoirs = cur.usize("reservoir count")?;
    let overlap = cur.usize("overlap")?;
    let partition = Partition::new(width, m_reservoirs, overlap)?;
    let w_x = cur.sparse("W_x")?;
    let w_u = cur.sparse("W_u")?;
    let reservoir = Reservoir::from_parts(hp, w_x, w_u)?;
    let shared = match cur.u8("readout mode")? {
        0 => true,
        1 => false,
        other => return Err(Error::Format(format!("unknown readout tag {other}"))),
    };
    let count = cur.usize("readout count")?;
    let mut mats = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let rows = cur.usize("readout rows")?;
        let cols = cur.usize("readout cols")?;
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Format("readout size overflows".into()))?;
        let raw = cur.take(len.checked_mul(8).ok_or_else(|| Error::Format("readout size overflows".into()))?, "readout")?;
        let values: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        mats.push(DMatrix::from_vec(rows, cols, values));
    }
    if cur.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after checkpoint payload",
            bytes.len() - cur.pos
        )));
    }
    let readout = if shared {
        if mats.len() != 1 {
            return Err(Error::Format(format!("shared readout stores {} matrices", mats.len())));
        }
        Readout::Shared(mats.pop().unwrap())
    } else {
        Readout::Independent(mats)
    };
    EsnModel::new(reservoir, partition, readout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::esn::build_reservoir;

    fn model() -> EsnModel {
        let hp = EsnHyperParams {
            d_s: 12,
            seed: 3,
            ..Default::default()
        };
        let part = Partition::new(8, 2, 2).unwrap();
        let res = build_reservoir(&hp, part.d_in()).unwrap();
        let w = DMatrix::from_fn(4, 12, |i, j| (i as f64 - j as f64) / 7.0);
        EsnModel::new(res, part, Readout::Independent(vec![w.clone(), -w])).unwrap()
    }

    #[test]
    fn roundtrip_is_exact() {
        let m = model();
        let bytes = checkpoint_bytes(&m);
        let back = checkpoint_from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(checkpoint_bytes(&back), bytes);
    }

    #[test]
    fn corrupt_inputs() {
        let bytes = checkpoint_bytes(&model());
        assert!(matches!(checkpoint_from_bytes(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(checkpoint_from_bytes(&bad), Err(Error::Format(_))));
        let mut long = bytes;
        long.push(0);
        assert!(matches!(checkpoint_from_bytes(&long), Err(Error::Format(_))));
    }
}

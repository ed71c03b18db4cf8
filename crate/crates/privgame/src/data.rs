//! Seeded synthetic dataset generation and the two-column CSV format.
//!
//! Generation is a pure function of `(model, n, seed)`: the generator is a
//! ChaCha8 stream seeded with `seed`, so datasets are reproducible across
//! platforms. Real values are serialized with Rust's shortest
//! round-trip float formatting, so write-then-read is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{BernoulliXorModel, GaussMixture};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Binary,
    Gaussian,
}

/// One record: the public value and the private bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRow {
    pub x: f64,
    pub y: u8,
}

/// Where a dataset came from, for provenance sidecars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub kind: DatasetKind,
    pub rows: Vec<DataRow>,
    pub provenance: Option<Provenance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Draw `n` i.i.d. rows from the XOR source: `X ~ Bern(p)`,
/// `N ~ Bern(q)`, `Y = X ^ N`.
pub fn gen_binary(model: &BernoulliXorModel, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            let x = u8::from(rng.gen_bool(model.p));
            let noise = u8::from(rng.gen_bool(model.q));
            DataRow { x: x as f64, y: x ^ noise }
        })
        .collect();
    Dataset {
        kind: DatasetKind::Binary,
        rows,
        provenance: Some(Provenance {
            model: format!("binary(p={}, q={})", model.p, model.q),
            seed,
        }),
    }
}

/// Draw `n` i.i.d. rows from the Gaussian mixture: `Y ~ Bern(ptilde)`,
/// `X | Y=0 ~ N(-mu, var0)`, `X | Y=1 ~ N(mu, var1)`.
pub fn gen_gauss(model: &GaussMixture, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd0 = model.var0.sqrt();
    let sd1 = model.var1.sqrt();
    let rows = (0..n)
        .map(|_| {
            let y = u8::from(rng.gen_bool(model.ptilde));
            let z: f64 = rng.sample(StandardNormal);
            let x = if y == 1 { model.mu + sd1 * z } else { -model.mu + sd0 * z };
            DataRow { x, y }
        })
        .collect();
    Dataset {
        kind: DatasetKind::Gaussian,
        rows,
        provenance: Some(Provenance {
            model: format!(
                "gauss(ptilde={}, mu={}, var0={}, var1={})",
                model.ptilde, model.mu, model.var0, model.var1
            ),
            seed,
        }),
    }
}

/// Write a dataset as `x,y` CSV (UTF-8, LF newlines, full-precision reals).
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(b"x,y\n")?;
    for row in &dataset.rows {
        writeln!(w, "{},{}", row.x, row.y)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a dataset back, validating the domain of the declared kind:
/// binary datasets must have `x` in `{0, 1}`, and `y` is always a bit.
pub fn read_csv(path: &Path, kind: DatasetKind) -> Result<Dataset> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::DatasetParse { line: 1, msg: "empty file".into() })??;
    if header.trim() != "x,y" {
        return Err(Error::DatasetParse {
            line: 1,
            msg: format!("expected header \"x,y\", found {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.splitn(2, ',');
        let xs = fields.next().unwrap_or("");
        let ys = fields.next().ok_or_else(|| Error::DatasetParse {
            line: lineno,
            msg: "missing y column".into(),
        })?;
        let x: f64 = xs.trim().parse().map_err(|e| Error::DatasetParse {
            line: lineno,
            msg: format!("bad x value {xs:?}: {e}"),
        })?;
        let y: u8 = match ys.trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::DatasetParse {
                    line: lineno,
                    msg: format!("y must be 0 or 1, found {other:?}"),
                })
            }
        };
        if kind == DatasetKind::Binary && x != 0.0 && x != 1.0 {
            return Err(Error::DatasetParse {
                line: lineno,
                msg: format!("binary dataset requires x in {{0, 1}}, found {x}"),
            });
        }
        if !x.is_finite() {
            return Err(Error::DatasetParse {
                line: lineno,
                msg: format!("x must be finite, found {x}"),
            });
        }
        rows.push(DataRow { x, y });
    }
    Ok(Dataset { kind, rows, provenance: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("privgame-data-test-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn degenerate_binary_model_is_constant() {
        let model = BernoulliXorModel::new(1.0, 0.0).unwrap();
        let ds = gen_binary(&model, 50, 7);
        assert!(ds.rows.iter().all(|r| r.x == 1.0 && r.y == 1));
    }

    #[test]
    fn binary_empirical_joint_close_to_model() {
        let model = BernoulliXorModel::new(0.5, 0.25).unwrap();
        let ds = gen_binary(&model, 10_000, 11);
        assert_eq!(ds.len(), 10_000);
        let mut counts = [0.0f64; 4];
        for r in &ds.rows {
            counts[(r.x as usize) * 2 + r.y as usize] += 1.0;
        }
        let expect = [0.375, 0.125, 0.125, 0.375];
        for (c, e) in counts.iter().zip(expect) {
            assert!(
                (c / 10_000.0 - e).abs() < 0.02,
                "cell off: {} vs {e}",
                c / 10_000.0
            );
        }
    }

    #[test]
    fn same_seed_same_dataset() {
        let model = BernoulliXorModel::new(0.3, 0.6).unwrap();
        assert_eq!(gen_binary(&model, 500, 3).rows, gen_binary(&model, 500, 3).rows);
        let g = GaussMixture::new(0.5, 3.0, 1.0, 1.0).unwrap();
        assert_eq!(gen_gauss(&g, 500, 3).rows, gen_gauss(&g, 500, 3).rows);
        assert_ne!(gen_gauss(&g, 500, 3).rows, gen_gauss(&g, 500, 4).rows);
    }

    #[test]
    fn gauss_empirical_stats_close_to_model() {
        // 3-sigma bounds at n = 20000.
        let model = GaussMixture::new(0.75, 3.0, 4.0, 1.0).unwrap();
        let ds = gen_gauss(&model, 20_000, 5);
        let n1 = ds.rows.iter().filter(|r| r.y == 1).count() as f64;
        assert!((n1 / 20_000.0 - 0.75).abs() < 0.02);
        let mean1: f64 =
            ds.rows.iter().filter(|r| r.y == 1).map(|r| r.x).sum::<f64>() / n1;
        assert!((mean1 - 3.0).abs() < 0.05, "class-1 mean {mean1}");
        let n0 = 20_000.0 - n1;
        let mean0: f64 =
            ds.rows.iter().filter(|r| r.y == 0).map(|r| r.x).sum::<f64>() / n0;
        assert!((mean0 + 3.0).abs() < 0.1, "class-0 mean {mean0}");
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let model = GaussMixture::new(0.5, 3.0, 1.0, 2.0).unwrap();
        let ds = gen_gauss(&model, 1000, 17);
        let path = tmp("roundtrip.csv");
        write_csv(&ds, &path).unwrap();
        let back = read_csv(&path, DatasetKind::Gaussian).unwrap();
        assert_eq!(ds.rows.len(), back.rows.len());
        for (a, b) in ds.rows.iter().zip(&back.rows) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y, b.y);
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn small_literal_file_parses() {
        let path = tmp("small.csv");
        std::fs::write(&path, "x,y\n0,1\n1,0\n").unwrap();
        let ds = read_csv(&path, DatasetKind::Binary).unwrap();
        assert_eq!(ds.rows.len(), 2);
        assert_eq!(ds.rows[0], DataRow { x: 0.0, y: 1 });
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn malformed_rows_error_with_line_number() {
        let path = tmp("bad.csv");
        std::fs::write(&path, "x,y\n0,1\nnope,1\n").unwrap();
        match read_csv(&path, DatasetKind::Binary) {
            Err(Error::DatasetParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::write(&path, "a,b\n0,1\n").unwrap();
        assert!(matches!(
            read_csv(&path, DatasetKind::Binary),
            Err(Error::DatasetParse { line: 1, .. })
        ));
        // Binary domain violation: x = 0.5 and y = 2 both rejected.
        std::fs::write(&path, "x,y\n0.5,1\n").unwrap();
        assert!(read_csv(&path, DatasetKind::Binary).is_err());
        std::fs::write(&path, "x,y\n0.5,2\n").unwrap();
        assert!(read_csv(&path, DatasetKind::Binary).is_err());
        std::fs::remove_file(path).ok();
    }
}

//! Binary snapshots: a UTF-8 header of `key = value` lines closed by a blank
//! line, then little-endian `f64` arrays of the interior, x fastest. Cell
//! variables come first (`rho, mx, my, mz` and `e` unless isothermal), then
//! `Bx, By, Bz` with `n_a + 1` entries along an active axis `a`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::eos::Eos;
use crate::grid::{Boundary, Grid, GridSpec, State};
use crate::Real;

pub const SNAPSHOT_SCHEMA: u32 = 1;
const MAGIC: &str = "mhd4-snapshot";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
}

fn corrupt(m: impl Into<String>) -> SnapshotError {
    SnapshotError::CorruptSnapshot(m.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub schema: u32,
    pub n: [usize; 3],
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub boundary: [Boundary; 3],
    pub time: f64,
    pub step: usize,
    pub scheme: String,
    pub problem: String,
    pub eos: Eos<f64>,
}

impl SnapshotHeader {
    fn cell_vars(&self) -> usize {
        self.eos.hydro_vars()
    }

    fn face_len(&self, a: usize) -> usize {
        let mut n = self.n;
        if n[a] > 1 {
            n[a] += 1;
        }
        n[0] * n[1] * n[2]
    }

    /// Number of `f64` values following the header.
    pub fn payload_len(&self) -> usize {
        self.cell_vars() * self.n.iter().product::<usize>() + (0..3).map(|a| self.face_len(a)).sum::<usize>()
    }

    fn render(&self) -> String {
        let join = |v: &[f64; 3]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let bnd = self.boundary.map(|b| match b {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        });
        let eos = match self.eos {
            Eos::Adiabatic { gamma } => format!("adiabatic {gamma:?}"),
            Eos::Isothermal { cs } => format!("isothermal {cs:?}"),
        };
        let vars = if self.eos.is_isothermal() { "rho mx my mz" } else { "rho mx my mz e" };
        format!(
            "{MAGIC}\nschema = {}\nn = {} {} {}\norigin = {}\nspacing = {}\nboundary = {}\ntime = {:?}\nstep = {}\nscheme = {}\nproblem = {}\neos = {}\ncells = {}\nfaces = bx by bz\n\n",
            self.schema,
            self.n[0],
            self.n[1],
            self.n[2],
            join(&self.origin),
            join(&self.spacing),
            bnd.join(" "),
            self.time,
            self.step,
            self.scheme,
            self.problem,
            eos,
            vars,
        )
    }

    fn parse(text: &str) -> Result<Self, SnapshotError> {
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(corrupt("missing magic line"));
        }
        let mut get = std::collections::HashMap::new();
        for l in lines {
            let (k, v) = l.split_once('=').ok_or_else(|| corrupt(format!("bad header line `{l}`")))?;
            get.insert(k.trim().to_string(), v.trim().to_string());
        }
        let field = |k: &str| get.get(k).map(String::as_str).ok_or_else(|| corrupt(format!("missing `{k}`")));
        let three = |k: &str| -> Result<[f64; 3], SnapshotError> {
            let v: Vec<f64> = field(k)?.split_whitespace().map(|s| s.parse().map_err(|_| corrupt(k.to_string()))).collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| corrupt(k.to_string()))
        };
        let n: Vec<usize> = field("n")?.split_whitespace().map(|s| s.parse().map_err(|_| corrupt("n"))).collect::<Result<_, _>>()?;
        let boundary: Vec<Boundary> = field("boundary")?
            .split_whitespace()
            .map(|s| match s {
                "periodic" => Ok(Boundary::Periodic),
                "open" => Ok(Boundary::Open),
                _ => Err(corrupt("boundary")),
            })
            .collect::<Result<_, _>>()?;
        let eos = match field("eos")?.split_once(' ') {
            Some(("adiabatic", g)) => Eos::Adiabatic { gamma: g.parse().map_err(|_| corrupt("eos"))? },
            Some(("isothermal", c)) => Eos::Isothermal { cs: c.parse().map_err(|_| corrupt("eos"))? },
            _ => return Err(corrupt("eos")),
        };
        Ok(SnapshotHeader {
            schema: field("schema")?.parse().map_err(|_| corrupt("schema"))?,
            n: n.try_into().map_err(|_| corrupt("n"))?,
            origin: three("origin")?,
            spacing: three("spacing")?,
            boundary: boundary.try_into().map_err(|_| corrupt("boundary"))?,
            time: field("time")?.parse().map_err(|_| corrupt("time"))?,
            step: field("step")?.parse().map_err(|_| corrupt("step"))?,
            scheme: field("scheme")?.to_string(),
            problem: field("problem")?.to_string(),
            eos,
        })
    }
}

/// Header for a state on `grid`; `origin` and `spacing` are stored exactly.
pub fn header_for<T: Real>(grid: &Grid<T>, eos: &Eos<T>, time: f64, step: usize, scheme: &str, problem: &str) -> SnapshotHeader {
    SnapshotHeader {
        schema: SNAPSHOT_SCHEMA,
        n: grid.spec.n,
        origin: grid.spec.origin.map(|x| x.to_f64_lossy()),
        spacing: grid.spec.spacing.map(|x| x.to_f64_lossy()),
        boundary: grid.spec.boundary,
        time,
        step,
        scheme: scheme.to_string(),
        problem: problem.to_string(),
        eos: match *eos {
            Eos::Adiabatic { gamma } => Eos::Adiabatic { gamma: gamma.to_f64_lossy() },
            Eos::Isothermal { cs } => Eos::Isothermal { cs: cs.to_f64_lossy() },
        },
    }
}

fn face_extent(n: [usize; 3], a: usize) -> [isize; 3] {
    let mut e = n.map(|x| x as isize);
    if n[a] > 1 {
        e[a] += 1;
    }
    e
}

/// Serialises `state` into bytes.
pub fn encode<T: Real>(header: &SnapshotHeader, grid: &Grid<T>, state: &State<T>) -> Vec<u8> {
    let mut out = header.render().into_bytes();
    out.reserve(8 * header.payload_len());
    let n = grid.spec.n.map(|x| x as isize);
    for q in 0..header.cell_vars() {
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    out.extend_from_slice(&state.cells[grid.idx(i, j, k)][q].to_f64_lossy().to_le_bytes());
                }
            }
        }
    }
    for a in 0..3 {
        let e = face_extent(grid.spec.n, a);
        for k in 0..e[2] {
            for j in 0..e[1] {
                for i in 0..e[0] {
                    out.extend_from_slice(&state.faces.comp[a][grid.idx(i, j, k)].to_f64_lossy().to_le_bytes());
                }
            }
        }
    }
    out
}

/// Parses bytes into a header, grid and state with ghosts filled.
pub fn decode<T: Real>(bytes: &[u8]) -> Result<(SnapshotHeader, Grid<T>, State<T>), SnapshotError> {
    let end = bytes.windows(2).position(|w| w == b"\n\n").ok_or_else(|| corrupt("unterminated header"))?;
    let text = std::str::from_utf8(&bytes[..end]).map_err(|_| corrupt("header is not UTF-8"))?;
    let header = SnapshotHeader::parse(text)?;
    if header.schema != SNAPSHOT_SCHEMA {
        return Err(corrupt(format!("unsupported schema {}", header.schema)));
    }
    let payload = &bytes[end + 2..];
    if payload.len() != 8 * header.payload_len() {
        return Err(corrupt(format!("expected {} payload bytes, found {}", 8 * header.payload_len(), payload.len())));
    }
    let spec = GridSpec {
        n: header.n,
        spacing: header.spacing.map(T::lit),
        origin: header.origin.map(T::lit),
        ghost: crate::grid::DEFAULT_GHOST,
        boundary: header.boundary,
    };
    let grid = Grid::new(spec).map_err(|e| corrupt(e.to_string()))?;
    let mut state = State::zeros(&grid);
    let mut values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")));
    let n = header.n.map(|x| x as isize);
    for q in 0..header.cell_vars() {
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    state.cells[grid.idx(i, j, k)][q] = T::lit(values.next().expect("length checked"));
                }
            }
        }
    }
    for a in 0..3 {
        let e = face_extent(header.n, a);
        for k in 0..e[2] {
            for j in 0..e[1] {
                for i in 0..e[0] {
                    state.faces.comp[a][grid.idx(i, j, k)] = T::lit(values.next().expect("length checked"));
                }
            }
        }
    }
    state.fill_ghosts(&grid);
    Ok((header, grid, state))
}

pub fn write_snapshot<T: Real>(path: &Path, header: &SnapshotHeader, grid: &Grid<T>, state: &State<T>) -> Result<(), SnapshotError> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    f.write_all(&encode(header, grid, state))?;
    f.flush()?;
    Ok(())
}

pub fn read_snapshot<T: Real>(path: &Path) -> Result<(SnapshotHeader, Grid<T>, State<T>), SnapshotError> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_state(n: [usize; 3], eos: Eos<f64>, seed: u64) -> (SnapshotHeader, Grid<f64>, State<f64>) {
        let grid = Grid::new(GridSpec::from_box(n, [0.0, -0.5, 0.0], [1.0, 0.5, 0.3], [Boundary::Periodic; 3])).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut s = State::zeros(&grid);
        grid.for_each_interior(|_, _, _, c| {
            s.cells[c] = std::array::from_fn(|_| rng.gen());
            if eos.is_isothermal() {
                s.cells[c][4] = 0.0;
            }
            for a in 0..3 {
                s.faces.comp[a][c] = rng.gen();
            }
        });
        s.fill_ghosts(&grid);
        let h = header_for(&grid, &eos, 0.125 + 1e-17, 12, "cweno4", "alfven");
        (h, grid, s)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        for (n, eos) in [([6, 5, 1], Eos::Adiabatic { gamma: 5.0 / 3.0 }), ([4, 3, 5], Eos::Isothermal { cs: 0.1 })] {
            let (h, g, s) = random_state(n, eos, 9);
            let bytes = encode(&h, &g, &s);
            let (h2, g2, s2) = decode::<f64>(&bytes).unwrap();
            assert_eq!(h, h2);
            assert_eq!(g.spec, g2.spec);
            assert_eq!(s, s2);
            assert_eq!(encode(&h2, &g2, &s2), bytes);
        }
    }

    #[test]
    fn two_dimensional_layout() {
        let (h, g, s) = random_state([6, 5, 1], Eos::Adiabatic { gamma: 5.0 / 3.0 }, 1);
        let bytes = encode(&h, &g, &s);
        let text = String::from_utf8_lossy(&bytes[..200]);
        assert!(text.contains("n = 6 5 1"));
        // cells, then x faces 7*5, y faces 6*6, z faces 6*5
        assert_eq!(h.payload_len(), 5 * 30 + 35 + 36 + 30);
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let (h, g, s) = random_state([4, 4, 1], Eos::Adiabatic { gamma: 5.0 / 3.0 }, 2);
        let bytes = encode(&h, &g, &s);
        for cut in [bytes.len() - 1, bytes.len() - 8, 40] {
            assert!(matches!(decode::<f64>(&bytes[..cut]), Err(SnapshotError::CorruptSnapshot(_))));
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.snap");
        write_snapshot(&p, &h, &g, &s).unwrap();
        assert_eq!(read_snapshot::<f64>(&p).unwrap().2, s);
    }
}

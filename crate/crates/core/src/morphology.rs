//! Soft actuator morphologies (SAMs): voxel grids of empty, passive and
//! contractile material, their validation, text I/O and test-set
//! generators.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest canvas: 20 voxels along x, 8 along y and z.
pub const MAX_DIMS: [usize; 3] = [20, 8, 8];

pub const EMPTY: u8 = 0;
pub const PASSIVE: u8 = 1;
pub const CONTRACTILE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    Empty,
    Passive,
    Contractile,
}

impl Material {
    pub fn code(self) -> u8 {
        match self {
            Material::Empty => EMPTY,
            Material::Passive => PASSIVE,
            Material::Contractile => CONTRACTILE,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            EMPTY => Some(Material::Empty),
            PASSIVE => Some(Material::Passive),
            CONTRACTILE => Some(Material::Contractile),
            _ => None,
        }
    }
}

/// A voxel grid. Cell `(x, y, z)` lives at flat index `(x * Y + y) * Z + z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sam {
    dims: [usize; 3],
    cells: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Bounds { dims: [usize; 3] },
    Code { at: [usize; 3], code: u8 },
    Unanchored,
    Disconnected { at: [usize; 3] },
    Empty,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Bounds { dims } => write!(f, "dims {dims:?} outside canvas {MAX_DIMS:?}"),
            Violation::Code { at, code } => write!(f, "material code {code} at {at:?}"),
            Violation::Unanchored => write!(f, "no voxel on the x = 0 plane"),
            Violation::Disconnected { at } => {
                write!(f, "voxel at {at:?} is not 6-connected to the body")
            }
            Violation::Empty => write!(f, "no voxels"),
        }
    }
}

fn check_dims(dims: [usize; 3]) -> Result<()> {
    if dims.iter().zip(MAX_DIMS).any(|(&d, m)| d == 0 || d > m) {
        return Err(Error::Bounds(format!(
            "dims {}x{}x{} outside 1..={}x{}x{}",
            dims[0], dims[1], dims[2], MAX_DIMS[0], MAX_DIMS[1], MAX_DIMS[2]
        )));
    }
    Ok(())
}

impl Sam {
    pub fn new(dims: [usize; 3]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Sam {
            dims,
            cells: vec![EMPTY; dims.iter().product()],
        })
    }

    /// Wraps raw codes without checking them; see [`Sam::validate`].
    pub fn from_codes(dims: [usize; 3], cells: Vec<u8>) -> Result<Self> {
        if cells.len() != dims.iter().product::<usize>() {
            return Err(Error::Arity {
                expected: dims.iter().product(),
                got: cells.len(),
            });
        }
        Ok(Sam { dims, cells })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn codes(&self) -> &[u8] {
        &self.cells
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    #[inline]
    pub fn code(&self, x: usize, y: usize, z: usize) -> u8 {
        self.cells[self.index(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, m: Material) {
        let i = self.index(x, y, z);
        self.cells[i] = m.code();
    }

    pub fn coords(&self, i: usize) -> [usize; 3] {
        let z = i % self.dims[2];
        let y = (i / self.dims[2]) % self.dims[1];
        let x = i / (self.dims[1] * self.dims[2]);
        [x, y, z]
    }

    /// Non-empty cells in index order.
    pub fn voxels(&self) -> impl Iterator<Item = ([usize; 3], u8)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != EMPTY)
            .map(|(i, &c)| (self.coords(i), c))
    }

    pub fn voxel_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != EMPTY).count()
    }

    pub fn contractile_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == CONTRACTILE).count()
    }

    fn neighbours(&self, [x, y, z]: [usize; 3]) -> impl Iterator<Item = [usize; 3]> {
        let d = self.dims;
        let mut out = Vec::with_capacity(6);
        if x > 0 { out.push([x - 1, y, z]) }
        if x + 1 < d[0] { out.push([x + 1, y, z]) }
        if y > 0 { out.push([x, y - 1, z]) }
        if y + 1 < d[1] { out.push([x, y + 1, z]) }
        if z > 0 { out.push([x, y, z - 1]) }
        if z + 1 < d[2] { out.push([x, y, z + 1]) }
        out.into_iter()
    }

    /// Size of the 6-connected component containing the first voxel, and the
    /// first voxel outside it if any.
    fn main_component(&self) -> (usize, Option<[usize; 3]>) {
        let Some(start) = self.cells.iter().position(|&c| c != EMPTY) else {
            return (0, None);
        };
        let mut seen = vec![false; self.cells.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([self.coords(start)]);
        let mut size = 0;
        while let Some(p) = queue.pop_front() {
            size += 1;
            for q in self.neighbours(p) {
                let j = self.index(q[0], q[1], q[2]);
                if !seen[j] && self.cells[j] != EMPTY {
                    seen[j] = true;
                    queue.push_back(q);
                }
            }
        }
        let stray = (0..self.cells.len())
            .find(|&i| self.cells[i] != EMPTY && !seen[i])
            .map(|i| self.coords(i));
        (size, stray)
    }

    fn anchored(&self) -> bool {
        let [_, ny, nz] = self.dims;
        (0..ny).any(|y| (0..nz).any(|z| self.code(0, y, z) != EMPTY))
    }

    /// Lists every invariant violation; an empty list means the SAM is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if check_dims(self.dims).is_err() {
            v.push(Violation::Bounds { dims: self.dims });
        }
        for (i, &c) in self.cells.iter().enumerate() {
            if Material::from_code(c).is_none() {
                v.push(Violation::Code {
                    at: self.coords(i),
                    code: c,
                });
            }
        }
        if self.voxel_count() == 0 {
            v.push(Violation::Empty);
            return v;
        }
        if !self.anchored() {
            v.push(Violation::Unanchored);
        }
        if let (_, Some(at)) = self.main_component() {
            v.push(Violation::Disconnected { at });
        }
        v
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            return Ok(());
        }
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(Error::InvalidSam(msg.join("; ")))
    }

    /// Copies this SAM into a larger canvas at the origin.
    pub fn embed(&self, dims: [usize; 3]) -> Result<Sam> {
        check_dims(dims)?;
        if self.dims.iter().zip(dims).any(|(&a, b)| a > b) {
            return Err(Error::Bounds(format!("{:?} does not fit in {dims:?}", self.dims)));
        }
        let mut out = Sam::new(dims)?;
        for (i, &c) in self.cells.iter().enumerate() {
            let [x, y, z] = self.coords(i);
            let j = out.index(x, y, z);
            out.cells[j] = c;
        }
        Ok(out)
    }

    /// Reflection across the y mid-plane.
    pub fn mirror_y(&self) -> Sam {
        let mut out = self.clone();
        let ny = self.dims[1];
        for (i, &c) in self.cells.iter().enumerate() {
            let [x, y, z] = self.coords(i);
            let j = out.index(x, ny - 1 - y, z);
            out.cells[j] = c;
        }
        out
    }

    pub fn to_text(&self) -> String {
        let [nx, ny, nz] = self.dims;
        let mut s = String::new();
        let _ = writeln!(s, "{nx} {ny} {nz}");
        for z in 0..nz {
            if z > 0 {
                s.push('\n');
            }
            for y in 0..ny {
                for x in 0..nx {
                    s.push(char::from(b'0' + self.code(x, y, z)));
                }
                s.push('\n');
            }
        }
        s
    }

    /// Parses the text format: a `X Y Z` header, then `Z` blocks of `Y` rows
    /// of `X` digits, blocks separated by blank lines.
    pub fn from_text(text: &str) -> Result<Sam> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| perr(1, "empty file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| perr(hline, format!("bad header `{header}`: {e}")))?;
        let dims: [usize; 3] = dims
            .try_into()
            .map_err(|_| perr(hline, format!("header needs 3 integers, got `{header}`")))?;
        check_dims(dims)?;
        let mut sam = Sam::new(dims)?;
        let [nx, ny, nz] = dims;
        for z in 0..nz {
            let mut y = 0;
            while y < ny {
                let (ln, row) = lines
                    .next()
                    .ok_or_else(|| perr(text.lines().count() + 1, format!("missing row {y} of layer {z}")))?;
                if row.trim().is_empty() {
                    if y == 0 {
                        continue;
                    }
                    return Err(perr(ln, format!("blank line inside layer {z}")));
                }
                if row.len() != nx {
                    return Err(perr(ln, format!("expected {nx} digits, got {}", row.len())));
                }
                for (x, ch) in row.chars().enumerate() {
                    let code = ch
                        .to_digit(10)
                        .ok_or_else(|| perr(ln, format!("non-digit `{ch}`")))?;
                    let i = sam.index(x, y, z);
                    sam.cells[i] = code as u8;
                }
                y += 1;
            }
        }
        if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(perr(ln, format!("trailing content `{extra}`")));
        }
        Ok(sam)
    }

    pub fn load(path: &Path) -> Result<Sam> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Sam::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Adds a one-voxel passive wall just outside the contractile extent of
/// every y-line and z-line, clipped to the canvas. Contractile voxels are
/// never overwritten and the operation is idempotent.
pub fn add_passive_enclosure(sam: &Sam) -> Result<Sam> {
    check_dims(sam.dims)?;
    let [nx, ny, nz] = sam.dims;
    let mut out = sam.clone();
    let wall = |out: &mut Sam, x: usize, y: usize, z: usize| {
        if out.code(x, y, z) == EMPTY {
            out.set(x, y, z, Material::Passive);
        }
    };
    for x in 0..nx {
        for z in 0..nz {
            let ys: Vec<usize> = (0..ny).filter(|&y| sam.code(x, y, z) == CONTRACTILE).collect();
            if let (Some(&lo), Some(&hi)) = (ys.first(), ys.last()) {
                if lo > 0 {
                    wall(&mut out, x, lo - 1, z);
                }
                if hi + 1 < ny {
                    wall(&mut out, x, hi + 1, z);
                }
            }
        }
        for y in 0..ny {
            let zs: Vec<usize> = (0..nz).filter(|&z| sam.code(x, y, z) == CONTRACTILE).collect();
            if let (Some(&lo), Some(&hi)) = (zs.first(), zs.last()) {
                if lo > 0 {
                    wall(&mut out, x, y, lo - 1);
                }
                if hi + 1 < nz {
                    wall(&mut out, x, y, hi + 1);
                }
            }
        }
    }
    Ok(out)
}

/// The region generators fill: full x extent, one voxel of margin on each
/// y/z side when the canvas allows it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BodyBox {
    pub y: (usize, usize),
    pub z: (usize, usize),
}

impl BodyBox {
    pub fn for_dims([_, ny, nz]: [usize; 3]) -> BodyBox {
        let span = |n: usize| if n >= 3 { (1, n - 1) } else { (0, n) };
        BodyBox {
            y: span(ny),
            z: span(nz),
        }
    }

    pub fn cells(&self, nx: usize) -> impl Iterator<Item = [usize; 3]> + '_ {
        (0..nx).flat_map(move |x| {
            (self.y.0..self.y.1).flat_map(move |y| (self.z.0..self.z.1).map(move |z| [x, y, z]))
        })
    }

    pub fn len(&self, nx: usize) -> usize {
        nx * (self.y.1 - self.y.0) * (self.z.1 - self.z.0)
    }

    pub fn is_empty(&self, nx: usize) -> bool {
        self.len(nx) == 0
    }
}

/// Fraction of body-box cells left empty.
pub fn hole_fraction(sam: &Sam) -> f64 {
    let b = BodyBox::for_dims(sam.dims);
    let nx = sam.dims[0];
    let empty = b.cells(nx).filter(|&[x, y, z]| sam.code(x, y, z) == EMPTY).count();
    empty as f64 / b.len(nx) as f64
}

fn require(dims: [usize; 3], min: [usize; 3], what: &str) -> Result<()> {
    check_dims(dims)?;
    if dims.iter().zip(min).any(|(&d, m)| d < m) {
        return Err(Error::Bounds(format!("{what} needs dims of at least {min:?}, got {dims:?}")));
    }
    Ok(())
}

/// Contractile body crossed by empty diagonal stripes of period 3.
///
/// The bottom body layer stays solid so the body remains connected; the
/// stripes run through every layer above it. `seed` selects the stripe
/// offset (`seed % 3`) and direction (`(seed / 3) % 2`).
pub fn generate_striped_diagonal(dims: [usize; 3], seed: u64) -> Result<Sam> {
    require(dims, [3, 3, 4], "striped SAM")?;
    let offset = (seed % 3) as usize;
    let anti = (seed / 3) % 2 == 1;
    let b = BodyBox::for_dims(dims);
    let mut sam = Sam::new(dims)?;
    for [x, y, z] in b.cells(dims[0]) {
        let key = if anti { x + dims[1] - 1 - y } else { x + y };
        let stripe = z > b.z.0 && (key + offset) % 3 == 0;
        if !stripe {
            sam.set(x, y, z, Material::Contractile);
        }
    }
    add_passive_enclosure(&sam)
}

/// Passive body whose contractile cross-section widens from a single
/// column at the bottom layer to the full body width at the top.
pub fn generate_pyramidal(dims: [usize; 3]) -> Result<Sam> {
    require(dims, [1, 4, 4], "pyramidal SAM")?;
    let b = BodyBox::for_dims(dims);
    let width = b.y.1 - b.y.0;
    let layers = b.z.1 - b.z.0;
    let mut sam = Sam::new(dims)?;
    for [x, y, z] in b.cells(dims[0]) {
        sam.set(x, y, z, Material::Passive);
    }
    for (j, z) in (b.z.0..b.z.1).enumerate() {
        let w = if layers == 1 {
            width
        } else {
            1 + ((j * (width - 1)) as f64 / (layers - 1) as f64).round() as usize
        };
        let start = b.y.0 + (width - w) / 2;
        for x in 0..dims[0] {
            for y in start..start + w {
                sam.set(x, y, z, Material::Contractile);
            }
        }
    }
    add_passive_enclosure(&sam)
}

const HOLE_MIN: f64 = 0.3;

/// Irregular connected blob with 30-50% of the body box carved out and a
/// random passive/contractile mix.
pub fn generate_fragmented(dims: [usize; 3], seed: u64) -> Result<Sam> {
    require(dims, [3, 3, 3], "fragmented SAM")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = BodyBox::for_dims(dims);
    let mut body = Sam::new(dims)?;
    let mut cells: Vec<[usize; 3]> = b.cells(dims[0]).collect();
    for &[x, y, z] in &cells {
        let m = if rng.random_bool(0.65) {
            Material::Contractile
        } else {
            Material::Passive
        };
        body.set(x, y, z, m);
    }
    let target = rng.random_range(0.36..0.46);
    let total = cells.len();
    cells.shuffle(&mut rng);
    let mut removed = 0;
    let carve = |body: &mut Sam, goal: usize, removed: &mut usize| {
        for &[x, y, z] in &cells {
            if *removed >= goal {
                break;
            }
            let old = body.code(x, y, z);
            if old == EMPTY {
                continue;
            }
            body.set(x, y, z, Material::Empty);
            if body.anchored() && body.main_component().1.is_none() && body.voxel_count() > 0 {
                *removed += 1;
            } else {
                let i = body.index(x, y, z);
                body.cells[i] = old;
            }
        }
    };
    carve(&mut body, (target * total as f64).round() as usize, &mut removed);
    loop {
        let sam = add_passive_enclosure(&body)?;
        if hole_fraction(&sam) >= HOLE_MIN || removed >= total {
            return Ok(sam);
        }
        let before = removed;
        carve(&mut body, removed + 1, &mut removed);
        if removed == before {
            return Ok(sam);
        }
    }
}

/// Nine fit-like SAMs: six striped variants and three pyramidal ones of
/// decreasing length.
pub fn nf_like_set(dims: [usize; 3]) -> Result<Vec<Sam>> {
    let mut out = Vec::with_capacity(9);
    for seed in 0..6 {
        out.push(generate_striped_diagonal(dims, seed)?);
    }
    for k in 0..3 {
        let len = dims[0].saturating_sub(k).max(1);
        out.push(generate_pyramidal([len, dims[1], dims[2]])?.embed(dims)?);
    }
    Ok(out)
}

pub const NW_SEEDS: [u64; 9] = [101, 102, 103, 104, 105, 106, 107, 108, 109];

/// Nine worst-like SAMs from fixed fragmented seeds.
pub fn nw_like_set(dims: [usize; 3]) -> Result<Vec<Sam>> {
    NW_SEEDS.iter().map(|&s| generate_fragmented(dims, s)).collect()
}

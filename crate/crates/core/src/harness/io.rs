//! Plain-text grids and matrices, and binary greyscale images.
//!
//! Numbers are written with 17 significant digits so they read back to the
//! same `f64`. Grid CSVs start with `nx,ny,xmin,xmax,ymin,ymax`; rows run
//! from `y_max` down. Line endings are always LF.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{sampling_grid, SamplingGrid};
use crate::imaging::ImageGrid;
use crate::CMatrix;

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_row(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| {
                Error::Usage(format!("{}: line {line_no}: bad number '{t}'", path.display()))
            })
        })
        .collect()
}

pub fn grid_csv_string(image: &ImageGrid) -> String {
    let g = image.grid();
    let mut s = String::with_capacity(24 * g.len() + 64);
    s.push_str("nx,ny,xmin,xmax,ymin,ymax\n");
    s.push_str(&format!(
        "{},{},{},{},{},{}\n",
        g.nx,
        g.ny,
        fmt_num(g.x_min),
        fmt_num(g.x_max),
        fmt_num(g.y_min),
        fmt_num(g.y_max)
    ));
    for row in image.values().chunks(g.nx) {
        let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn write_grid_csv(image: &ImageGrid, path: &Path) -> Result<()> {
    write_file(path, grid_csv_string(image).as_bytes())
}

/// Read a grid CSV back as its sampling grid and row-major values.
pub fn read_grid_csv(path: &Path) -> Result<(SamplingGrid, Vec<f64>)> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let bad = |what: &str| Error::Usage(format!("{}: {what}", path.display()));
    if lines.next() != Some("nx,ny,xmin,xmax,ymin,ymax") {
        return Err(bad("missing grid header"));
    }
    let dims = lines.next().ok_or_else(|| bad("missing grid dimensions"))?;
    let parts: Vec<&str> = dims.split(',').collect();
    if parts.len() != 6 {
        return Err(bad("grid dimensions need six fields"));
    }
    let nx: usize = parts[0].parse().map_err(|_| bad("bad nx"))?;
    let ny: usize = parts[1].parse().map_err(|_| bad("bad ny"))?;
    let b = parse_row(path, 2, &parts[2..].join(","))?;
    let grid = sampling_grid([b[0], b[1], b[2], b[3]], nx, ny)?;
    let mut values = Vec::with_capacity(nx * ny);
    for (i, line) in lines.enumerate() {
        let row = parse_row(path, i + 3, line)?;
        if row.len() != nx {
            return Err(bad(&format!("row {} has {} values, expected {nx}", i + 1, row.len())));
        }
        values.extend(row);
    }
    if values.len() != nx * ny {
        return Err(bad(&format!("expected {ny} rows")));
    }
    Ok((grid, values))
}

/// 8-bit greyscale scaling `round(255 (v − min)/(max − min))`; a constant
/// grid maps to zeros.
pub fn pgm_bytes(image: &ImageGrid) -> Vec<u8> {
    let g = image.grid();
    let (lo, hi) = (image.min(), image.max());
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    out.extend(image.values().iter().map(|&v| {
        if hi > lo {
            (255.0 * (v - lo) / (hi - lo)).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}

pub fn write_grid_pgm(image: &ImageGrid, path: &Path) -> Result<()> {
    write_file(path, &pgm_bytes(image))
}

/// Width, height and pixel bytes of a binary PGM written by [`write_grid_pgm`].
pub fn read_grid_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |what: &str| Error::Usage(format!("{}: {what}", path.display()));
    // header is three LF-terminated lines
    let mut pos = 0;
    let mut fields = Vec::new();
    for _ in 0..3 {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad("truncated header"))?;
        fields.push(String::from_utf8_lossy(&bytes[pos..pos + end]).to_string());
        pos += end + 1;
    }
    if fields[0] != "P5" || fields[2] != "255" {
        return Err(bad("not an 8-bit binary PGM"));
    }
    let (w, h) = fields[1].split_once(' ').ok_or_else(|| bad("bad size line"))?;
    let w: usize = w.parse().map_err(|_| bad("bad width"))?;
    let h: usize = h.parse().map_err(|_| bad("bad height"))?;
    let data = bytes[pos..].to_vec();
    if data.len() != w * h {
        return Err(bad("payload size does not match header"));
    }
    Ok((w, h, data))
}

fn matrix_csv_string(m: &CMatrix, part: impl Fn(&Complex64) -> f64) -> String {
    let mut s = String::with_capacity(24 * m.len());
    for r in 0..m.nrows() {
        let line: Vec<String> = m.row(r).iter().map(|v| fmt_num(part(v))).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Real and imaginary parts as two headerless CSV files.
pub fn write_matrix_csv(m: &CMatrix, path_re: &Path, path_im: &Path) -> Result<()> {
    write_file(path_re, matrix_csv_string(m, |v| v.re).as_bytes())?;
    write_file(path_im, matrix_csv_string(m, |v| v.im).as_bytes())
}

fn read_real_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .enumerate()
        .map(|(i, l)| parse_row(path, i + 1, l))
        .collect::<Result<_>>()?;
    if let Some(r) = rows.iter().find(|r| r.len() != rows[0].len()) {
        return Err(Error::Usage(format!("{}: ragged row of length {}", path.display(), r.len())));
    }
    Ok(rows)
}

pub fn read_matrix_csv(path_re: &Path, path_im: &Path) -> Result<CMatrix> {
    let re = read_real_matrix(path_re)?;
    let im = read_real_matrix(path_im)?;
    let (rows, cols) = (re.len(), re.first().map_or(0, Vec::len));
    if im.len() != rows || im.first().map_or(0, Vec::len) != cols {
        return Err(Error::Usage(format!(
            "{} and {} differ in shape",
            path_re.display(),
            path_im.display()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| Complex64::new(re[r][c], im[r][c])))
}

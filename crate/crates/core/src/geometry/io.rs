//! Plain-text file formats.
//!
//! * Ball configurations: one `x y z r` line per ball.
//! * Voxel sets: a header `voxel <nx> <ny> <nz> <h> <ox> <oy> <oz>` followed by
//!   run lengths of the occupancy in x-fastest order. Runs alternate between
//!   empty and occupied cells and always start with an empty run (possibly 0).
//! * Axisymmetric shapes: a single line `axisym <R0> <c2> <c3> ... <cL>`.
//!
//! Blank lines and anything after `#` are ignored. Floats are written in
//! shortest round-trip form, so writing then reading is lossless.

use std::fmt::Write as _;

use super::{AxisymmetricShape, Ball, BallConfiguration, Shape, VoxelSet};
use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(n, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((n + 1, tokens))
    })
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("{token:?}: {e}"),
    })
}

fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|e| Error::Parse {
        line,
        message: format!("{token:?}: {e}"),
    })
}

pub fn parse_balls(text: &str) -> Result<BallConfiguration> {
    let mut balls = Vec::new();
    for (line, tokens) in content_lines(text) {
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected `x y z r`, found {} fields", tokens.len()),
            });
        }
        let v: Vec<f64> = tokens
            .iter()
            .map(|t| parse_f64(t, line))
            .collect::<Result<_>>()?;
        balls.push(Ball::new([v[0], v[1], v[2]], v[3]));
    }
    BallConfiguration::new(balls)
}

pub fn write_balls(config: &BallConfiguration) -> String {
    let mut out = String::new();
    for b in config.balls() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            b.center[0], b.center[1], b.center[2], b.radius
        );
    }
    out
}

pub fn parse_voxels(text: &str) -> Result<VoxelSet> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing voxel header".into(),
    })?;
    if header.len() != 8 || header[0] != "voxel" {
        return Err(Error::Parse {
            line,
            message: "expected `voxel <nx> <ny> <nz> <h> <ox> <oy> <oz>`".into(),
        });
    }
    let dims = [
        parse_usize(header[1], line)?,
        parse_usize(header[2], line)?,
        parse_usize(header[3], line)?,
    ];
    let h = parse_f64(header[4], line)?;
    let origin = [
        parse_f64(header[5], line)?,
        parse_f64(header[6], line)?,
        parse_f64(header[7], line)?,
    ];
    let total = dims[0]
        .checked_mul(dims[1])
        .and_then(|v| v.checked_mul(dims[2]))
        .ok_or(Error::Parse {
            line,
            message: "grid too large".into(),
        })?;
    let mut occupancy = Vec::with_capacity(total);
    let mut value = false;
    let mut last_line = line;
    for (line, tokens) in lines {
        last_line = line;
        for t in tokens {
            let run = parse_usize(t, line)?;
            if occupancy.len() + run > total {
                return Err(Error::Parse {
                    line,
                    message: format!("runs exceed the {total} cells of the grid"),
                });
            }
            occupancy.extend(std::iter::repeat_n(value, run));
            value = !value;
        }
    }
    if occupancy.len() != total {
        return Err(Error::Parse {
            line: last_line,
            message: format!("runs cover {} of {total} cells", occupancy.len()),
        });
    }
    VoxelSet::new(origin, h, dims, occupancy)
}

pub fn write_voxels(set: &VoxelSet) -> String {
    let [nx, ny, nz] = set.dims();
    let o = set.origin();
    let mut out = format!(
        "voxel {nx} {ny} {nz} {} {} {} {}\n",
        set.spacing(),
        o[0],
        o[1],
        o[2]
    );
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0usize;
    for &cell in set.occupancy() {
        if cell == current {
            len += 1;
        } else {
            runs.push(len);
            current = cell;
            len = 1;
        }
    }
    runs.push(len);
    for chunk in runs.chunks(16) {
        let line: Vec<String> = chunk.iter().map(usize::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_axisymmetric(text: &str) -> Result<AxisymmetricShape> {
    let mut lines = content_lines(text);
    let (line, tokens) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing axisym line".into(),
    })?;
    if tokens.len() < 2 || tokens[0] != "axisym" {
        return Err(Error::Parse {
            line,
            message: "expected `axisym <R0> <c2> ... <cL>`".into(),
        });
    }
    if let Some((extra, _)) = lines.next() {
        return Err(Error::Parse {
            line: extra,
            message: "unexpected content after the axisym line".into(),
        });
    }
    let values: Vec<f64> = tokens[1..]
        .iter()
        .map(|t| parse_f64(t, line))
        .collect::<Result<_>>()?;
    AxisymmetricShape::new(values[0], values[1..].to_vec())
}

pub fn write_axisymmetric(shape: &AxisymmetricShape) -> String {
    let mut out = format!("axisym {}", shape.base_radius());
    for c in shape.coefficients() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    out
}

/// Reads any of the three formats, dispatching on the first token.
pub fn parse_shape(text: &str) -> Result<Shape> {
    match content_lines(text).next().map(|(_, t)| t[0]) {
        Some("voxel") => parse_voxels(text).map(Shape::Voxels),
        Some("axisym") => parse_axisymmetric(text).map(Shape::Axisymmetric),
        _ => parse_balls(text).map(Shape::Balls),
    }
}

pub fn write_shape(shape: &Shape) -> String {
    match shape {
        Shape::Balls(b) => write_balls(b),
        Shape::Voxels(v) => write_voxels(v),
        Shape::Axisymmetric(a) => write_axisymmetric(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Measure;
    use proptest::prelude::*;

    #[test]
    fn ball_file_with_comments() {
        let text = "# two balls\n0 0 0 1\n\n10 0 0 1  # far\n";
        let c = parse_balls(text).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_balls(&write_balls(&c)).unwrap(), c);
    }

    #[test]
    fn malformed_inputs_report_lines() {
        assert!(matches!(
            parse_balls("0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_balls("0 0 0 1\n0 0 x 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_voxels("voxel 2 2 2 0.1 0 0 0\n3 2\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_voxels("voxel 1 1 1 0.1 0 0 0\n0 5\n"),
            Err(Error::Parse { .. })
        ));
        assert!(parse_balls("0 0 0 1\n1 0 0 1\n").is_err());
    }

    #[test]
    fn voxel_header_is_bit_exact() {
        let v = VoxelSet::new([-1.05, 0.0, 0.25], 0.05, [2, 1, 1], vec![false, true]).unwrap();
        let text = write_voxels(&v);
        assert_eq!(text, "voxel 2 1 1 0.05 -1.05 0 0.25\n1 1\n");
        assert_eq!(parse_voxels(&text).unwrap(), v);
    }

    #[test]
    fn shape_dispatch() {
        let a = parse_shape("axisym 1.2 0.1 0.05\n").unwrap();
        assert!(matches!(a, Shape::Axisymmetric(_)));
        let b = parse_shape("0 0 0 1\n").unwrap();
        assert!((b.volume() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        assert!(parse_shape("axisym 1 -2\n").is_err());
    }

    proptest! {
        #[test]
        fn voxel_round_trip(bits in proptest::collection::vec(any::<bool>(), 24), h in 0.01f64..2.0, ox in -5.0f64..5.0) {
            let v = VoxelSet::new([ox, 0.5, -ox], h, [2, 3, 4], bits).unwrap();
            prop_assert_eq!(parse_voxels(&write_voxels(&v)).unwrap(), v);
        }
    }
}

//! Parsers for the textual argument forms: complex numbers `a+bi`, points
//! `a+bi,c+di`, point grids `grid:rmin:rmax:count`, integer ranges `1..4`
//! and comma lists.

use num_complex::Complex64;

/// Parses `1`, `-0.5`, `0.3i`, `-i`, `0.5+0i`, `1e-3-2.5e-1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let num = |t: &str| -> Result<f64, String> {
        t.parse::<f64>().map_err(|_| format!("bad number '{t}' in '{s}'"))
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(num(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => num(t),
        }
    };
    match split {
        Some(i) => Ok(Complex64::new(num(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Parses one point `a+bi[,c+di,...]`.
pub fn parse_point(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

/// A requested set of evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    Explicit(Vec<Vec<Complex64>>),
    Grid { rmin: f64, rmax: f64, count: usize },
}

/// Parses `grid:rmin:rmax:count` or `;`-separated explicit points.
pub fn parse_points(s: &str) -> Result<PointSpec, String> {
    if let Some(rest) = s.strip_prefix("grid:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid needs rmin:rmax:count, got '{rest}'"));
        }
        let rmin: f64 = parts[0].parse().map_err(|_| format!("bad rmin '{}'", parts[0]))?;
        let rmax: f64 = parts[1].parse().map_err(|_| format!("bad rmax '{}'", parts[1]))?;
        let count: usize = parts[2].parse().map_err(|_| format!("bad count '{}'", parts[2]))?;
        if count == 0 || !(0.0 <= rmin && rmin <= rmax && rmax < 1.0) {
            return Err(format!("grid needs 0 <= rmin <= rmax < 1 and count >= 1, got '{rest}'"));
        }
        return Ok(PointSpec::Grid { rmin, rmax, count });
    }
    let pts = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_point)
        .collect::<Result<Vec<_>, _>>()?;
    if pts.is_empty() {
        return Err("no points given".into());
    }
    Ok(PointSpec::Explicit(pts))
}

/// Radii `rmin, ..., rmax` of a grid, evenly spaced.
pub fn grid_radii(rmin: f64, rmax: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![rmin];
    }
    (0..count)
        .map(|i| rmin + (rmax - rmin) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Parses `3`, `1..4` (inclusive) or `1,2,4`.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start '{a}'"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end '{b}'"))?;
        if a > b {
            return Err(format!("empty range '{s}'"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad integer '{t}'")))
        .collect()
}

/// Parses `1` or `0.5,1,2`.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("0.5+0i").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-0.2-0.3i").unwrap(), c(-0.2, -0.3));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("0.1-i").unwrap(), c(0.1, -1.0));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), c(1e-3, 2e-2));
        assert_eq!(parse_complex("-1e-3i").unwrap(), c(0.0, -1e-3));
        assert!(parse_complex("").is_err());
        assert!(parse_complex("x+2i").is_err());
    }

    #[test]
    fn points_and_grids() {
        assert_eq!(
            parse_points("0.5+0i").unwrap(),
            PointSpec::Explicit(vec![vec![c(0.5, 0.0)]])
        );
        assert_eq!(
            parse_points("0.1,0.2i;0.3,0").unwrap(),
            PointSpec::Explicit(vec![vec![c(0.1, 0.0), c(0.0, 0.2)], vec![c(0.3, 0.0), c(0.0, 0.0)]])
        );
        assert_eq!(
            parse_points("grid:0.1:0.7:8").unwrap(),
            PointSpec::Grid { rmin: 0.1, rmax: 0.7, count: 8 }
        );
        assert!(parse_points("grid:0.1:1.2:8").is_err());
        let r = grid_radii(0.1, 0.7, 4);
        assert!((r[3] - 0.7).abs() < 1e-15 && (r[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_usize_list("2").unwrap(), vec![2]);
        assert_eq!(parse_usize_list("1,3").unwrap(), vec![1, 3]);
        assert!(parse_usize_list("4..1").is_err());
        assert_eq!(parse_f64_list("0.5,1,2").unwrap(), vec![0.5, 1.0, 2.0]);
    }
}

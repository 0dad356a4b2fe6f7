//! Text forms of states and measurements used on the command line.
//!
//! States: `mixed-bell:<a>`, `werner:<p>`, `random:<seed>:<d>:<rank>`,
//! `file:<path>`. Measurements: `z`, `x`, `y`, `bloch:<theta>:<phi>`.
//!
//! A state file holds `d_A d_B` on its first line followed by `d·d` lines of
//! `re im`, row-major, with `d = d_A·d_B`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{self, BlochAngles, ProjectiveMeasurement};
use crate::qmat::ComplexMatrix;
use crate::states::{self, DensityMatrix};

fn number<T: std::str::FromStr>(what: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("cannot read {what} from `{s}`")))
}

/// Parses a state literal; `file:` paths are read from disk.
pub fn parse_state(literal: &str) -> Result<DensityMatrix> {
    let (kind, rest) = literal
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("state literal `{literal}` has no `kind:` prefix")))?;
    match kind {
        "mixed-bell" => states::mixed_bell(number("a", rest)?),
        "werner" => states::werner(number("p", rest)?),
        "random" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let [seed, d, rank] = parts[..] else {
                return Err(Error::Parse(format!("expected random:<seed>:<d>:<rank>, got `{literal}`")));
            };
            let d: usize = number("d", d)?;
            let rho = states::random_density(number("seed", seed)?, d, number("rank", rank)?)?;
            // Even dimensions are split as a qubit A against the rest.
            if d.is_multiple_of(2) && d >= 4 {
                rho.with_dims((2, d / 2))
            } else {
                Ok(rho)
            }
        }
        "file" => read_state_file(Path::new(rest)),
        other => Err(Error::Parse(format!("unknown state kind `{other}`"))),
    }
}

pub fn read_state_file(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read state file {}: {e}", path.display())))?;
    parse_state_text(&text)
}

pub fn parse_state_text(text: &str) -> Result<DensityMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("state file is empty".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [d_a, d_b] = dims[..] else {
        return Err(Error::Parse(format!("first line must be `d_A d_B`, got `{header}`")));
    };
    let (d_a, d_b): (usize, usize) = (number("d_A", d_a)?, number("d_B", d_b)?);
    let d = d_a * d_b;
    let mut entries = Vec::with_capacity(d * d);
    for (n, line) in lines.enumerate() {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [re, im] = parts[..] else {
            return Err(Error::Parse(format!("entry line {} must be `re im`, got `{line}`", n + 2)));
        };
        entries.push(Complex64::new(number("re", re)?, number("im", im)?));
    }
    if entries.len() != d * d {
        return Err(Error::Parse(format!("expected {} entries for a {d}x{d} matrix, found {}", d * d, entries.len())));
    }
    DensityMatrix::new(ComplexMatrix::from_row_major(d, d, entries)?, Some((d_a, d_b)))
}

/// Renders a state in the file format read by [`parse_state_text`].
pub fn format_state_text(rho: &DensityMatrix) -> Result<String> {
    let (d_a, d_b) = rho.require_dims()?;
    let mut out = format!("{d_a} {d_b}\n");
    for z in rho.matrix().as_slice() {
        out.push_str(&format!("{:e} {:e}\n", z.re, z.im));
    }
    Ok(out)
}

pub fn parse_measurement(literal: &str) -> Result<ProjectiveMeasurement> {
    match literal {
        "z" | "Z" => Ok(measure::pauli_z()),
        "x" | "X" => Ok(measure::pauli_x()),
        "y" | "Y" => Ok(measure::pauli_y()),
        _ => {
            let parts: Vec<&str> = literal.split(':').collect();
            match parts[..] {
                ["bloch", theta, phi] => {
                    let angles = BlochAngles::new(number("theta", theta)?, number("phi", phi)?)?;
                    let m = measure::projective_from_bloch(angles);
                    ProjectiveMeasurement::from_basis(literal, m.basis().to_vec())
                }
                _ => Err(Error::Parse(format!("unknown measurement `{literal}`"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_literals() {
        assert_eq!(parse_state("mixed-bell:0.25").unwrap(), states::mixed_bell(0.25).unwrap());
        assert_eq!(parse_state("werner:0.5").unwrap(), states::werner(0.5).unwrap());
        let r = parse_state("random:7:4:2").unwrap();
        assert_eq!(r.dims(), Some((2, 2)));
        assert_eq!(r.matrix(), states::random_density(7, 4, 2).unwrap().matrix());
        assert!(matches!(parse_state("mixed-bell:2"), Err(Error::OutOfRange(_))));
        assert!(matches!(parse_state("bogus:1"), Err(Error::Parse(_))));
        assert!(matches!(parse_state("werner"), Err(Error::Parse(_))));
        assert!(matches!(parse_state("random:1:4"), Err(Error::Parse(_))));
    }

    #[test]
    fn state_text_round_trip() {
        let rho = states::random_two_qubit(12, 3).unwrap();
        let back = parse_state_text(&format_state_text(&rho).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-14);
        assert_eq!(back.dims(), Some((2, 2)));
    }

    #[test]
    fn state_text_errors() {
        assert!(matches!(parse_state_text(""), Err(Error::Parse(_))));
        assert!(matches!(parse_state_text("2\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_state_text("1 2\n1 0\n0 0\n0 0\n"), Err(Error::Parse(_))));
        let non_psd = "1 2\n1.5 0\n0 0\n0 0\n-0.5 0\n";
        let err = parse_state_text(non_psd).unwrap_err();
        assert!(err.to_string().contains("positive semidefinite"));
    }

    #[test]
    fn measurement_literals() {
        assert_eq!(parse_measurement("z").unwrap().label(), "z");
        let m = parse_measurement("bloch:1.5707963267948966:0").unwrap();
        assert_eq!(m.label(), "bloch:1.5707963267948966:0");
        assert!((measure::overlap_c(&m, &measure::pauli_x()).unwrap() - 1.0).abs() < 1e-15);
        assert!(parse_measurement("bloch:4:0").is_err());
        assert!(parse_measurement("w").is_err());
    }
}

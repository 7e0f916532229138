//! Controller parameter files: flat `key = value` text with exactly the keys
//! a1..a3, b1..b3, c1..c3, Ge, Gde, Gu. Values are written with 18
//! significant digits so a file round-trips to the same controller bit for
//! bit.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::fuzzy::{ControllerParams, Gains, MembershipTriple};

pub const KEYS: [&str; 12] = [
    "a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3", "Ge", "Gde", "Gu",
];

#[derive(Debug, Error)]
pub enum ParamsFileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key {0}")]
    MissingKey(&'static str),
    #[error("invalid parameters: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn values_of(p: &ControllerParams) -> [f64; 12] {
    [
        p.e_mf.a1,
        p.e_mf.a2,
        p.e_mf.a3,
        p.de_mf.a1,
        p.de_mf.a2,
        p.de_mf.a3,
        p.singletons[0],
        p.singletons[1],
        p.singletons[2],
        p.gains.ge,
        p.gains.gde,
        p.gains.gu,
    ]
}

pub fn write_params<W: Write>(w: &mut W, p: &ControllerParams) -> io::Result<()> {
    for (key, value) in KEYS.iter().zip(values_of(p)) {
        writeln!(w, "{key} = {value:.17e}")?;
    }
    Ok(())
}

/// Parses a parameter file and gates it on the controller invariants, so a
/// loaded file is always simulatable.
pub fn read_params<R: BufRead>(r: R) -> Result<ControllerParams, ParamsFileError> {
    let mut values = [None::<f64>; 12];
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, value) = text.split_once('=').ok_or_else(|| ParamsFileError::Parse {
            line: lineno,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| ParamsFileError::Parse {
                line: lineno,
                msg: format!("unknown key `{key}`"),
            })?;
        if values[slot].is_some() {
            return Err(ParamsFileError::Parse {
                line: lineno,
                msg: format!("duplicate key `{key}`"),
            });
        }
        let parsed = value.trim().parse::<f64>().map_err(|e| ParamsFileError::Parse {
            line: lineno,
            msg: format!("bad number for `{key}`: {e}"),
        })?;
        values[slot] = Some(parsed);
    }
    let mut v = [0.0; 12];
    for i in 0..12 {
        v[i] = values[i].ok_or(ParamsFileError::MissingKey(KEYS[i]))?;
    }
    let params = ControllerParams {
        e_mf: MembershipTriple {
            a1: v[0],
            a2: v[1],
            a3: v[2],
        },
        de_mf: MembershipTriple {
            a1: v[3],
            a2: v[4],
            a3: v[5],
        },
        singletons: [v[6], v[7], v[8]],
        gains: Gains {
            ge: v[9],
            gde: v[10],
            gu: v[11],
        },
    };
    params.validate().map_err(ParamsFileError::Invariant)?;
    Ok(params)
}

pub fn save(path: &Path, p: &ControllerParams) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_params(&mut w, p)?;
    w.flush()
}

pub fn load(path: &Path) -> Result<ControllerParams, ParamsFileError> {
    read_params(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ControllerParams {
        ControllerParams {
            e_mf: MembershipTriple {
                a1: -0.73,
                a2: -0.1,
                a3: 0.42,
            },
            de_mf: MembershipTriple {
                a1: -0.5,
                a2: 0.001,
                a3: 0.97,
            },
            singletons: [-0.99, 0.03, 0.61],
            gains: Gains::default(),
        }
    }

    #[test]
    fn round_trips_bit_for_bit() {
        let p = sample();
        let mut buf = Vec::new();
        write_params(&mut buf, &p).unwrap();
        let q = read_params(&buf[..]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn file_has_one_line_per_key_in_order() {
        let mut buf = Vec::new();
        write_params(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let keys: Vec<&str> = text
            .lines()
            .map(|l| l.split('=').next().unwrap().trim())
            .collect();
        assert_eq!(keys, KEYS);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line_number() {
        let text = "a1 = -0.5\nbogus = 1\n";
        match read_params(text.as_bytes()) {
            Err(ParamsFileError::Parse { line: 2, msg }) => assert!(msg.contains("bogus")),
            other => panic!("expected a parse error on line 2, got {other:?}"),
        }
    }

    #[test]
    fn missing_keys_are_rejected() {
        let mut buf = Vec::new();
        write_params(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let without_gu: String = text.lines().take(11).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_params(without_gu.as_bytes()),
            Err(ParamsFileError::MissingKey("Gu"))
        ));
    }

    #[test]
    fn ill_ordered_parameters_are_rejected() {
        let mut p = sample();
        p.e_mf.a2 = p.e_mf.a1 - 0.2;
        let mut buf = Vec::new();
        write_params(&mut buf, &p).unwrap();
        assert!(matches!(
            read_params(&buf[..]),
            Err(ParamsFileError::Invariant(_))
        ));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let mut buf = Vec::new();
        write_params(&mut buf, &sample()).unwrap();
        buf.extend_from_slice(b"a1 = 0.0\n");
        assert!(matches!(
            read_params(&buf[..]),
            Err(ParamsFileError::Parse { line: 13, .. })
        ));
    }
}

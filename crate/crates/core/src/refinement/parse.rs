use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Generator, RefinementMask};
use crate::algebraic::{LaurentTranslate, NumberField};
use crate::error::{Error, Result};

/// Parses a mask description:
///
/// ```text
/// # comments start with '#'
/// dilation-poly = -1,-1        # c0,...,c_{d-1}; a single value c0 means alpha = -c0
/// rank = 2
/// coeffs = 0,1,0,1 | 0,0,1,0   # row-major entries per coefficient, '|' between coefficients
/// translates = 0 | 0:1         # "j:c;j:c" per translate, "0" for the zero translate
/// phihat0 = 0.618,1            # optional
/// ```
///
/// Entries are complex numbers such as `1`, `-0.5`, `1+2i`. Instead of a list,
/// `coeffs = generator:dyadic` selects a built-in infinite sequence, in which
/// case `translates` is omitted.
pub fn parse_mask_file(text: &str, precision_bits: u32) -> Result<RefinementMask> {
    let mut kv: HashMap<String, String> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('_', "-");
        if kv.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    for key in kv.keys() {
        if !["dilation-poly", "rank", "coeffs", "translates", "phihat0"].contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown key `{key}`")));
        }
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| Error::Parse(format!("missing key `{k}`")));
    let field = NumberField::from_poly_str(get("dilation-poly")?, precision_bits)?;
    let rank: usize = match kv.get("rank") {
        Some(r) => r.parse().map_err(|_| Error::Parse(format!("rank `{r}`")))?,
        None => 1,
    };
    if rank == 0 {
        return Err(Error::Parse("rank must be positive".into()));
    }
    let phihat0 = kv
        .get("phihat0")
        .map(|s| parse_complex_list(s).map(DVector::from_vec))
        .transpose()?;
    let coeffs = get("coeffs")?;
    if let Some(name) = coeffs.strip_prefix("generator:") {
        let generator = named_generator(name.trim())?;
        if rank != 1 {
            return Err(Error::Parse("generators are scalar".into()));
        }
        return RefinementMask::from_generator(field, generator, phihat0);
    }
    let mats = coeffs
        .split('|')
        .map(|entry| {
            let vals = parse_complex_list(entry)?;
            if vals.len() != rank * rank {
                return Err(Error::Parse(format!(
                    "coefficient `{}` has {} entries, rank {rank} needs {}",
                    entry.trim(),
                    vals.len(),
                    rank * rank
                )));
            }
            Ok(DMatrix::from_row_slice(rank, rank, &vals))
        })
        .collect::<Result<Vec<_>>>()?;
    let translates = get("translates")?
        .split('|')
        .map(LaurentTranslate::parse)
        .collect::<Result<Vec<_>>>()?;
    RefinementMask::new(field, mats, translates, phihat0)
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<Complex64>()
                .map_err(|_| Error::Parse(format!("complex number `{t}`")))
        })
        .collect()
}

fn named_generator(name: &str) -> Result<Generator> {
    match name {
        "dyadic" => Ok(Generator {
            name: "dyadic".into(),
            c: 2.0,
            rho: 0.5,
            term: |k| {
                let e = 1 - k as i64;
                (
                    DMatrix::from_element(1, 1, Complex64::new(2f64.powi(e as i32), 0.0)),
                    LaurentTranslate::monomial(e, 1),
                )
            },
        }),
        other => Err(Error::UnknownExample(format!("generator `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::BuiltinMask;

    #[test]
    fn golden_vector_file() {
        let text = "dilation-poly = -1,-1\nrank = 2\ncoeffs = 0,1,0,1 | 0,0,1,0\ntranslates = 0 | 0:1\n";
        let m = parse_mask_file(text, 128).unwrap();
        let b = BuiltinMask::GoldenVector.build().unwrap();
        for &y in &[0.0, 0.4, 3.3] {
            assert!((m.eval_symbol(y).value - b.eval_symbol(y).value).norm() < 1e-15);
        }
        assert!((m.phihat0() - b.phihat0()).norm() < 1e-15);
    }

    #[test]
    fn scalar_and_generator_files() {
        let boxcar = parse_mask_file("dilation-poly=-2\ncoeffs=1|1\ntranslates=0|0:1 # boxcar", 128).unwrap();
        assert!(boxcar.eval_symbol(0.5).scalar().norm() < 1e-15);
        let dy = parse_mask_file("dilation-poly = -2\ncoeffs = generator:dyadic", 128).unwrap();
        let b = BuiltinMask::Dyadic.build().unwrap();
        assert_eq!(dy.eval_symbol(1.3).scalar(), b.eval_symbol(1.3).scalar());
    }

    #[test]
    fn errors() {
        assert!(parse_mask_file("coeffs = 1", 128).is_err());
        assert!(parse_mask_file("dilation-poly=-2\ncoeffs=1|1\ntranslates=0|0:1\ncolour=red", 128).is_err());
        assert!(matches!(
            parse_mask_file("dilation-poly=-2\ncoeffs=1|0.5\ntranslates=0|0:1", 128),
            Err(Error::Normalization { .. })
        ));
        assert!(parse_mask_file("dilation-poly=-2\nrank=2\ncoeffs=1,0|1\ntranslates=0|0:1", 128).is_err());
    }
}

//! The persisted value cache: one `D,p,q,<hex float C(p/q)>` record per line,
//! sorted by `(D, q, p)`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use grhcot_core::cotsum::{CValueCache, CacheKey};
use grhcot_core::Discriminant;

use crate::error::{CliError, CliResult};

/// C99 `%a` style hexadecimal float, exact for every finite value.
pub fn format_hex(v: f64) -> String {
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, e) = if exp == 0 { (0, -1022) } else { (1, exp - 1023) };
    let frac = format!("{mant:013x}");
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}0x{lead}p{e:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{e:+}")
    }
}

pub fn parse_hex(s: &str) -> Option<f64> {
    hexf_parse::parse_hexf64(s, false).ok()
}

fn parse_line(line: &str) -> Result<(CacheKey, f64), String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let [d, p, q, v] = fields[..] else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    let d: i64 = d.parse().map_err(|_| format!("bad discriminant {d:?}"))?;
    Discriminant::new(d).map_err(|e| e.to_string())?;
    let p: u64 = p.parse().map_err(|_| format!("bad numerator {p:?}"))?;
    let q: u64 = q.parse().map_err(|_| format!("bad denominator {q:?}"))?;
    if p == 0 || p > q || gcd(p, q) != 1 {
        return Err(format!("{p}/{q} is not a reduced fraction in (0, 1]"));
    }
    let v = parse_hex(v).ok_or_else(|| format!("bad hex float {v:?}"))?;
    Ok((CacheKey { d, q, p }, v))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Loads a cache file; a missing file yields an empty cache.
pub fn load(path: &Path) -> CliResult<CValueCache> {
    let mut cache = CValueCache::new();
    let file = match fs::File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
        Err(e) => return Err(CliError::io(path, e)),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (key, v) = parse_line(&line).map_err(|message| CliError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        })?;
        cache.insert(key, v);
    }
    Ok(cache)
}

pub fn write_to(cache: &CValueCache, out: &mut impl Write) -> std::io::Result<()> {
    for (k, v) in cache.iter() {
        writeln!(out, "{},{},{},{}", k.d, k.p, k.q, format_hex(*v))?;
    }
    Ok(())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn save(cache: &CValueCache, path: &Path) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    let mut buf = Vec::new();
    write_to(cache, &mut buf).map_err(|e| CliError::io(&tmp, e))?;
    fs::write(&tmp, &buf).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        for v in [
            0.0,
            -0.0,
            1.0,
            -2.5,
            std::f64::consts::PI,
            f64::MIN_POSITIVE,
            f64::MIN_POSITIVE / 3.0,
            f64::MAX,
            1e-300,
        ] {
            let s = format_hex(v);
            assert_eq!(parse_hex(&s).unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_hex(1.0), "0x1p+0");
        assert_eq!(format_hex(0.75), "0x1.8p-1");
    }

    #[test]
    fn bad_lines() {
        assert!(parse_line("-4,1,2").is_err());
        assert!(parse_line("-4,2,4,0x1p+0").is_err());
        assert!(parse_line("-5,1,2,0x1p+0").is_err());
        assert!(parse_line("-4,1,2,1.0").is_err());
        assert!(parse_line("-4,1,2,0x1.8p-1").is_ok());
    }
}

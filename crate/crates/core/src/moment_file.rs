//! Plain-text moment files.
//!
//! ```text
//! # legendre-moments v1 <Nx> <Ny> <M> <method>
//! <p> <q> <value>
//! ...
//! ```
//!
//! Values carry 17 significant digits, which round-trips every finite `f64`.

use crate::error::{Error, Position, Result};
use crate::table::{moment_count, MomentTable};

const MAGIC: &str = "legendre-moments";
const VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentFileHeader {
    pub nx: usize,
    pub ny: usize,
    pub order: usize,
    pub method: String,
}

pub fn write_moments(table: &MomentTable, method: &str) -> Result<String> {
    if method.is_empty() || method.contains(char::is_whitespace) {
        return Err(Error::InvalidArgument(format!("method tag '{method}' must be one word")));
    }
    let mut out = format!(
        "# {MAGIC} {VERSION} {} {} {} {method}\n",
        table.nx(),
        table.ny(),
        table.order()
    );
    for (p, q, v) in table.iter() {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("L_{p},{q} = {v} is not finite")));
        }
        out.push_str(&format!("{p} {q} {v:.16e}\n"));
    }
    Ok(out)
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::parse("moment file", Position::Line(line), msg)
}

pub fn read_moments(text: &str) -> Result<(MomentTable, MomentFileHeader)> {
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let fields: Vec<&str> = header_line.split_whitespace().collect();
    if fields.len() != 7 || fields[0] != "#" || fields[1] != MAGIC {
        return Err(perr(1, "expected '# legendre-moments v1 Nx Ny M method'"));
    }
    if fields[2] != VERSION {
        return Err(perr(1, format!("unsupported version '{}'", fields[2])));
    }
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| perr(1, format!("{what} '{s}' is not a non-negative integer")))
    };
    let header = MomentFileHeader {
        nx: num(fields[3], "Nx")?,
        ny: num(fields[4], "Ny")?,
        order: num(fields[5], "M")?,
        method: fields[6].to_string(),
    };
    let m = header.order;
    let mut table = MomentTable::zeros(m, header.nx, header.ny);
    let mut seen = vec![false; moment_count(m)];
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(perr(lineno, "expected 'p q value'"));
        }
        let p: usize = parts[0].parse().map_err(|_| perr(lineno, format!("bad p '{}'", parts[0])))?;
        let q: usize = parts[1].parse().map_err(|_| perr(lineno, format!("bad q '{}'", parts[1])))?;
        if p + q > m {
            return Err(perr(lineno, format!("({p},{q}) exceeds order {m}")));
        }
        let v: f64 = parts[2]
            .parse()
            .map_err(|_| perr(lineno, format!("bad value '{}'", parts[2])))?;
        if !v.is_finite() {
            return Err(perr(lineno, format!("non-finite value '{}'", parts[2])));
        }
        let slot = table.index(p, q);
        if seen[slot] {
            return Err(perr(lineno, format!("duplicate record ({p},{q})")));
        }
        seen[slot] = true;
        table.set(p, q, v);
    }
    if let Some(missing) = table.iter().map(|(p, q, _)| (p, q)).find(|&(p, q)| !seen[table.index(p, q)]) {
        return Err(perr(
            text.lines().count(),
            format!("missing record ({},{})", missing.0, missing.1),
        ));
    }
    Ok((table, header))
}

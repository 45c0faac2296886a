//! JSON operator files.
//!
//! ```json
//! {
//!   "block_size": 1,
//!   "window": [0, 2],
//!   "diagonals": {
//!     "1": [
//!       [[[1, 0]]],
//!       [[[2, 0]]],
//!       [[[3, 0]]]
//!     ]
//!   }
//! }
//! ```
//!
//! Each diagonal lists one `m x m` block per window column, rows outermost,
//! entries as `[re, im]`. An optional `"exact_interior"` (`[lo, hi]` or
//! `null`) records the columns known to be free of truncation effects; it is
//! written only when it differs from the window. The writer is canonical:
//! offsets ascend numerically, one block per line, and numbers use 17
//! significant digits, so re-writing a canonical file reproduces it byte for
//! byte.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::Value;

use nswiener_core::{Block, IndexWindow, NSOperator};

/// Diagonal entries in file order, duplicates rejected while parsing.
struct RawDiagonals(Vec<(String, Value)>);

impl<'de> Deserialize<'de> for RawDiagonals {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor;

        impl<'de> Visitor<'de> for EntriesVisitor {
            type Value = RawDiagonals;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping offsets to block arrays")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawDiagonals, A::Error> {
                let mut entries: Vec<(String, Value)> = Vec::new();
                while let Some((key, value)) = map.next_entry::<String, Value>()? {
                    if entries.iter().any(|(k, _)| *k == key) {
                        return Err(de::Error::custom(format!(
                            "duplicate offset \"{key}\" in diagonals"
                        )));
                    }
                    entries.push((key, value));
                }
                Ok(RawDiagonals(entries))
            }
        }

        deserializer.deserialize_map(EntriesVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    block_size: Value,
    window: Value,
    #[serde(default)]
    exact_interior: Option<Value>,
    diagonals: RawDiagonals,
}

/// Parse failure with a message that names the offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError(msg.into()))
}

fn window_of(v: &Value, key: &str) -> Result<IndexWindow, FormatError> {
    let pair = v.as_array().filter(|a| a.len() == 2);
    let (Some(lo), Some(hi)) = (
        pair.and_then(|a| a[0].as_i64()),
        pair.and_then(|a| a[1].as_i64()),
    ) else {
        return fail(format!("{key}: expected [lo, hi] with integer bounds"));
    };
    IndexWindow::new(lo, hi).or_else(|_| fail(format!("{key}: lo = {lo} exceeds hi = {hi}")))
}

fn number(v: &Value, key: &str) -> Result<f64, FormatError> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => fail(format!("{key}: expected a finite number")),
    }
}

fn block_of(v: &Value, m: usize, key: &str) -> Result<Block, FormatError> {
    let rows = match v.as_array() {
        Some(r) if r.len() == m => r,
        _ => return fail(format!("{key}: expected {m} rows")),
    };
    let mut data = Vec::with_capacity(m * m);
    for (r, row) in rows.iter().enumerate() {
        let entries = match row.as_array() {
            Some(e) if e.len() == m => e,
            _ => return fail(format!("{key}[{r}]: expected {m} entries")),
        };
        for (c, z) in entries.iter().enumerate() {
            let k = format!("{key}[{r}][{c}]");
            match z.as_array() {
                Some(p) if p.len() == 2 => {
                    data.push(Complex64::new(number(&p[0], &k)?, number(&p[1], &k)?))
                }
                _ => return fail(format!("{k}: expected an [re, im] pair")),
            }
        }
    }
    Ok(Block::from_row_major(m, data))
}

pub fn parse_operator(text: &str) -> Result<NSOperator, FormatError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| FormatError(e.to_string()))?;
    let m = match raw.block_size.as_u64() {
        Some(m) if m >= 1 => m as usize,
        _ => return fail("block_size: expected a positive integer"),
    };
    let window = window_of(&raw.window, "window")?;
    let mut diagonals: BTreeMap<i64, Vec<Block>> = BTreeMap::new();
    for (key, value) in &raw.diagonals.0 {
        let Ok(n) = key.trim().parse::<i64>() else {
            return fail(format!("diagonals: offset \"{key}\" is not an integer"));
        };
        if diagonals.contains_key(&n) {
            return fail(format!("diagonals: offset \"{key}\" repeats offset {n}"));
        }
        let path = format!("diagonals.\"{key}\"");
        let blocks = match value.as_array() {
            Some(b) if b.len() == window.len() => b,
            Some(b) => {
                return fail(format!(
                    "{path}: expected {} blocks (one per window column), found {}",
                    window.len(),
                    b.len()
                ))
            }
            None => return fail(format!("{path}: expected an array of blocks")),
        };
        let parsed = blocks
            .iter()
            .enumerate()
            .map(|(j, b)| block_of(b, m, &format!("{path}[{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        diagonals.insert(n, parsed);
    }
    let op = NSOperator::from_diagonals(m, window, diagonals)
        .map_err(|e| FormatError(format!("diagonals: {e}")))?;
    match raw.exact_interior {
        None => Ok(op),
        Some(Value::Null) => Ok(op.with_exact_interior(None)),
        Some(v) => {
            let e = window_of(&v, "exact_interior")?;
            if !window.contains_window(&e) {
                return fail(format!(
                    "exact_interior: {e} is not inside the window {window}"
                ));
            }
            Ok(op.with_exact_interior(Some(e)))
        }
    }
}

/// `printf("%.17g", x)`, with negative zero printed as `0`.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_block(out: &mut String, b: &Block) {
    let m = b.size();
    out.push('[');
    for r in 0..m {
        if r > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for c in 0..m {
            if c > 0 {
                out.push_str(", ");
            }
            let z = b.get(r, c);
            let _ = write!(out, "[{}, {}]", format_g17(z.re), format_g17(z.im));
        }
        out.push(']');
    }
    out.push(']');
}

/// Canonical text of an operator file, newline terminated.
pub fn write_operator(op: &NSOperator) -> String {
    let window = op.window();
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"block_size\": {},", op.block_size());
    let _ = writeln!(out, "  \"window\": [{}, {}],", window.lo(), window.hi());
    match op.exact_interior() {
        Some(e) if e == window => {}
        Some(e) => {
            let _ = writeln!(out, "  \"exact_interior\": [{}, {}],", e.lo(), e.hi());
        }
        None => out.push_str("  \"exact_interior\": null,\n"),
    }
    out.push_str("  \"diagonals\": {");
    let count = op.support().len();
    for (k, (n, d)) in op.diagonals().enumerate() {
        let _ = write!(out, "\n    \"{n}\": [");
        for (j, (_, b)) in d.iter().enumerate() {
            out.push_str(if j == 0 { "\n      " } else { ",\n      " });
            write_block(&mut out, b);
        }
        out.push_str("\n    ]");
        if k + 1 < count {
            out.push(',');
        }
    }
    out.push_str(if count == 0 { "}\n" } else { "\n  }\n" });
    out.push_str("}\n");
    out
}

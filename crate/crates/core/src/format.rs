//! Helpers shared by the line-oriented text formats.
//!
//! Every format starts with a magic line, may carry `#` comment lines (the CLI
//! writes its resolved configuration there), and stores reals either as
//! six-decimal fixed point or in Rust's shortest round-trip form.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::outline::quantize;

pub(crate) fn fixed(v: f64) -> String {
    format!("{:.6}", quantize(v))
}

pub(crate) fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub(crate) fn unquote(s: &str, line: usize) -> Result<String> {
    serde_json::from_str(s).map_err(|e| Error::format(line, format!("bad quoted string: {e}")))
}

/// Writes the optional comment header, one `# ` line per entry.
pub(crate) fn write_header(out: &mut String, header: &[String]) {
    for h in header {
        out.push_str("# ");
        out.push_str(h);
        out.push('\n');
    }
}

pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    pub(crate) last: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-comment line with its 1-based number.
    pub(crate) fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            if l.starts_with('#') || l.trim().is_empty() {
                continue;
            }
            return Some((i + 1, l));
        }
        None
    }

    pub(crate) fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| {
            Error::format(
                self.last + 1,
                format!("unexpected end of input, expected {what}"),
            )
        })
    }

    /// Reads `keyword rest...` and returns `rest`.
    pub(crate) fn keyed(&mut self, keyword: &str) -> Result<(usize, &'a str)> {
        let (n, l) = self.expect(keyword)?;
        match l.split_once(' ') {
            Some((k, rest)) if k == keyword => Ok((n, rest)),
            None if l == keyword => Ok((n, "")),
            _ => Err(Error::format(n, format!("expected {keyword:?}"))),
        }
    }
}

pub(crate) fn parse<T: FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::format(line, format!("cannot parse {what} from {s:?}")))
}

pub(crate) fn parse_finite(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = parse(s, line, what)?;
    if !v.is_finite() {
        return Err(Error::format(line, format!("{what} is not finite")));
    }
    Ok(v)
}

pub(crate) fn check_magic(lines: &mut Lines<'_>, magic: &str) -> Result<()> {
    let (n, l) = lines.expect(magic)?;
    if l != magic {
        return Err(Error::format(
            n,
            format!("expected header {magic:?}, found {l:?}"),
        ));
    }
    Ok(())
}

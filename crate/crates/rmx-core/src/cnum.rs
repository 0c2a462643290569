//! Complex-scalar helpers: the `a+bi` text form used on the command line
//! and a 17-significant-digit decimal serialization that round-trips every
//! finite `f64` exactly.

/// Double-precision complex number used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Shorthand constructor.
#[inline]
pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The imaginary unit.
#[inline]
pub fn i() -> C64 {
    C64::new(0.0, 1.0)
}

/// Parse a complex number in the `a+bi` form.
///
/// Accepted shapes (no internal spaces):
///
/// ```text
/// 1.5        -2.3e-4      i       -i      2i      1e3i
/// 0.3+0.2i   1e-2-3.5e-1i         -0.4+i  0.7-i
/// ```
///
/// The split between the real and imaginary parts is the last `+`/`-` that
/// is neither the leading sign nor an exponent sign.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".to_string());
    }
    let parse_f64 = |p: &str| -> Result<f64, String> {
        p.parse::<f64>()
            .map_err(|_| format!("invalid number {p:?} in complex literal {t:?}"))
    };
    if let Some(body) = t.strip_suffix('i') {
        // imaginary part present
        match split_re_im(body) {
            Some(idx) => {
                let re = parse_f64(&body[..idx])?;
                let im = match &body[idx..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    p => parse_f64(p)?,
                };
                Ok(cx(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    p => parse_f64(p)?,
                };
                Ok(cx(0.0, im))
            }
        }
    } else {
        Ok(cx(parse_f64(t)?, 0.0))
    }
}

/// Index of the sign that separates the real from the imaginary part of
/// `body` (the literal with the trailing `i` stripped), or `None` when the
/// whole body is a single number.
fn split_re_im(body: &str) -> Option<usize> {
    let bytes = body.as_bytes();
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && bytes[idx - 1] != b'e' && bytes[idx - 1] != b'E' {
            return Some(idx);
        }
    }
    None
}

/// Serialize an `f64` with 17 significant digits (`{:.16e}`), enough for a
/// lossless decimal round-trip of every finite double.
#[inline]
pub fn format_f64_exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// Human-oriented `a+bi` rendering (shortest `f64` display per part).
pub fn format_complex(z: C64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

//! Small numeric helpers shared across modules.

/// Log of a sum of exponentials, stable against overflow.
///
/// Returns negative infinity for an empty slice; a single `+inf` term
/// dominates and yields `+inf`.
pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        // empty slice or every term -inf (max = -inf), or a +inf term
        return max;
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

/// `ln(1 + e^y)` without overflow for large positive `y`.
pub(crate) fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Formats a float with 17 significant digits, enough for a lossless
/// f64 round trip through text.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Keys of a compact JSON document in the order they appear. Used by
/// tests that pin serialized field order, which `serde_json::Value`
/// cannot check because it re-sorts maps. Only handles the flat shapes
/// serialized here: a quoted string directly followed by a colon is a
/// key.
#[cfg(test)]
pub(crate) fn json_keys(json: &str) -> Vec<String> {
    let bytes = json.as_bytes();
    let mut keys = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'"' {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end] != b'"' {
                end += 1;
            }
            if bytes.get(end + 1) == Some(&b':') {
                keys.push(json[start..end].to_string());
            }
            i = end + 1;
        }
        i += 1;
    }
    keys
}

//! Small shared helpers.

/// Formats a float with 12 significant digits in scientific notation,
/// the fixed width used by all emitted CSV and manifest values.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{:.11e}", x)
}

//! Fixed decimal formatting shared by the CSV and JSON writers.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits in scientific notation.
///
/// Non-finite values format as the empty string (CSV) and serialize as
/// `null` (JSON).
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// JSON number emitted with [`sig17`] formatting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(sig17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(sig17(-2.0), "-2.0000000000000000e0");
        assert_eq!(sig17(f64::NAN), "");
        let s = serde_json::to_string(&[Sig17(0.5), Sig17(f64::INFINITY)]).unwrap();
        assert_eq!(s, "[5.0000000000000000e-1,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.5), None]);
    }
}

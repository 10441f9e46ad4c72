use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::marker::PhantomData;

/// Unit symbol carried by a quantity (geometric units, `G = c = 1`).
pub trait Unit: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const SYMBOL: &'static str;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Length;
impl Unit for Length {
    const SYMBOL: &'static str = "L";
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseLength;
impl Unit for InverseLength {
    const SYMBOL: &'static str = "1/L";
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dimensionless;
impl Unit for Dimensionless {
    const SYMBOL: &'static str = "1";
}

/// Decimal number written as a string with its unit, e.g. `"2.5 L"`.
///
/// The text is kept verbatim so that serialization reproduces the input.
#[derive(Clone, Debug, PartialEq)]
pub struct Quantity<U: Unit> {
    text: String,
    value: f64,
    unit: PhantomData<U>,
}

impl<U: Unit> Quantity<U> {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut parts = text.split_whitespace();
        let (num, unit) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(u), None) => (n, u),
            _ => return Err(format!("quantity {text:?} must read \"<decimal> {}\"", U::SYMBOL)),
        };
        if unit != U::SYMBOL {
            return Err(format!("quantity {text:?} has unit {unit:?}, expected {:?}", U::SYMBOL));
        }
        let value: f64 = num.parse().map_err(|_| format!("{num:?} is not a decimal number"))?;
        if !value.is_finite() {
            return Err(format!("{num:?} is not finite"));
        }
        Ok(Self { text: format!("{num} {unit}"), value, unit: PhantomData })
    }

    /// Quantity from a value, written with Rust's shortest round-trip format.
    pub fn new(value: f64) -> Self {
        Self { text: format!("{value:?} {}", U::SYMBOL), value, unit: PhantomData }
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl<U: Unit> fmt::Display for Quantity<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl<U: Unit> Serialize for Quantity<U> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de, U: Unit> Deserialize<'de> for Quantity<U> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(D::Error::custom)
    }
}

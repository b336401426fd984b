//! Stable text forms for reports: 17-significant-digit floats, spectrum
//! listings and CSV series.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::exactnum::Quad;

/// `%.17g`: 17 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e17)`.
pub fn format_f17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn raw_number(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        format_f17(x)
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub(crate) fn ser_f17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw_number(*x).serialize(s)
}

pub(crate) fn ser_f17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => raw_number(*x).serialize(s),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &raw_number(z.re))?;
    st.serialize_field("im", &raw_number(z.im))?;
    st.end()
}

impl Serialize for Quad {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for crate::exactnum::QuadRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Serialize)]
struct SpectrumEntry {
    value: Quad,
    #[serde(serialize_with = "ser_f17")]
    float: f64,
    multiplicity: usize,
}

/// `[{"value": "a+b√2", "float": x, "multiplicity": m}, …]`.
pub fn spectrum_json(spectrum: &[(Quad, usize)]) -> String {
    let entries: Vec<SpectrumEntry> = spectrum
        .iter()
        .map(|&(value, multiplicity)| SpectrumEntry {
            value,
            float: value.to_f64(),
            multiplicity,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("spectrum serializes")
}

/// `t,fidelity` header plus one line per sample.
pub fn series_csv(series: &[(f64, f64)]) -> String {
    let mut out = String::from("t,fidelity\n");
    for &(t, f) in series {
        out.push_str(&format_f17(t));
        out.push(',');
        out.push_str(&format_f17(f));
        out.push('\n');
    }
    out
}

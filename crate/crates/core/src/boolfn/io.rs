use super::BooleanFunction;
use crate::error::{JuntaError, Result};
use serde::{Deserialize, Serialize};

/// On-disk form of a truth table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub n: usize,
    pub table_hex: String,
}

/// Packs the table into hex digits, entry 0 in the most significant bit of the first digit.
pub fn table_to_hex(f: &BooleanFunction) -> String {
    let size = f.size();
    let digits = size.div_ceil(4);
    let mut s = String::with_capacity(digits);
    for d in 0..digits {
        let mut nib = 0u32;
        for b in 0..4 {
            let x = d * 4 + b;
            if x < size && f.bit(x as u32) {
                nib |= 8 >> b;
            }
        }
        s.push(char::from_digit(nib, 16).unwrap());
    }
    s
}

pub fn table_from_hex(n: usize, hex: &str) -> Result<BooleanFunction> {
    if n > BooleanFunction::MAX_VARS {
        return Err(JuntaError::DimensionTooLarge {
            n,
            limit: BooleanFunction::MAX_VARS,
        });
    }
    let size = 1usize << n;
    let digits: Vec<u32> = hex
        .trim()
        .chars()
        .map(|c| {
            c.to_digit(16)
                .ok_or_else(|| JuntaError::Parse(format!("bad hex digit {c:?}")))
        })
        .collect::<Result<_>>()?;
    if digits.len() != size.div_ceil(4) {
        return Err(JuntaError::Parse(format!(
            "table for n = {n} needs {} hex digits, got {}",
            size.div_ceil(4),
            digits.len()
        )));
    }
    BooleanFunction::from_fn(n, |x| {
        let x = x as usize;
        digits[x / 4] & (8 >> (x % 4)) != 0
    })
}

pub fn function_to_json(f: &BooleanFunction) -> String {
    serde_json::to_string(&FunctionFile {
        n: f.n(),
        table_hex: table_to_hex(f),
    })
    .expect("plain struct serializes")
}

pub fn function_from_json(text: &str) -> Result<BooleanFunction> {
    let file: FunctionFile =
        serde_json::from_str(text).map_err(|e| JuntaError::Parse(e.to_string()))?;
    table_from_hex(file.n, &file.table_hex)
}

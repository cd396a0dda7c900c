//! Text encodings of bit vectors.

use clap::ValueEnum;

use crate::error::{config_err, Result};

/// Bit-string format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitFormat {
    /// Characters `0` and `1`.
    Bin,
    /// Hexadecimal digits, four bits each, most significant first; the last
    /// digit is zero-padded.
    Hex,
}

/// Parses exactly `len` bits; whitespace is ignored.
pub fn parse_bits(text: &str, format: BitFormat, len: usize) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(len);
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        match format {
            BitFormat::Bin => match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(config_err(format!("invalid binary digit {ch:?}"))),
            },
            BitFormat::Hex => {
                let v = ch.to_digit(16).ok_or_else(|| config_err(format!("invalid hex digit {ch:?}")))?;
                bits.extend((0..4).rev().map(|i| ((v >> i) & 1) as u8));
            }
        }
    }
    let expected = match format {
        BitFormat::Bin => len,
        BitFormat::Hex => len.div_ceil(4) * 4,
    };
    if bits.len() != expected || bits[len..].iter().any(|&b| b != 0) {
        return Err(config_err(format!("expected {len} bits, got {}", bits.len())));
    }
    bits.truncate(len);
    Ok(bits)
}

/// Formats bits without separators.
pub fn format_bits(bits: &[u8], format: BitFormat) -> String {
    match format {
        BitFormat::Bin => bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect(),
        BitFormat::Hex => bits
            .chunks(4)
            .map(|c| {
                let v = (0..4).fold(0u32, |acc, i| (acc << 1) | u32::from(c.get(i).copied().unwrap_or(0)));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrips() {
        let bits = vec![1, 0, 1, 1, 0, 0, 1];
        for f in [BitFormat::Bin, BitFormat::Hex] {
            assert_eq!(parse_bits(&format_bits(&bits, f), f, 7).unwrap(), bits);
        }
        assert_eq!(format_bits(&bits, BitFormat::Hex), "b2");
        assert_eq!(parse_bits("10 1\n", BitFormat::Bin, 3).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_bits("102", BitFormat::Bin, 3).is_err());
        assert!(parse_bits("1", BitFormat::Bin, 2).is_err());
        assert!(parse_bits("b3", BitFormat::Hex, 7).is_err());
        assert!(parse_bits("zz", BitFormat::Hex, 8).is_err());
    }
}
